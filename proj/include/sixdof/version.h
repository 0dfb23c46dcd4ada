// SPDX-License-Identifier: MIT

#ifndef SIXDOF_VERSION_H_
#define SIXDOF_VERSION_H_

namespace sixdof {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sixdof

#endif  // SIXDOF_VERSION_H_

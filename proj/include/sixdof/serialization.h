// SPDX-License-Identifier: MIT

#ifndef SIXDOF_SERIALIZATION_H_
#define SIXDOF_SERIALIZATION_H_

#include <json.hpp>

#include "sixdof/camera.h"
#include "sixdof/pose.h"

namespace sixdof {

// Pose as a JSON array of 16 numbers: the 4x4 homogeneous matrix, row-major.
nlohmann::json pose_to_json(const Pose& pose);
// Accepts rotations orthonormal within `tolerance`; throws Error(kParseError).
Pose pose_from_json(const nlohmann::json& j, double tolerance = 1e-6);

nlohmann::json intrinsics_to_json(const Intrinsics& k);
Intrinsics intrinsics_from_json(const nlohmann::json& j);

nlohmann::json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j);

}  // namespace sixdof

#endif  // SIXDOF_SERIALIZATION_H_

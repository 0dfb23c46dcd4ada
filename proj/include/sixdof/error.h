// SPDX-License-Identifier: MIT

#ifndef SIXDOF_ERROR_H_
#define SIXDOF_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sixdof {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateInput,
  kInsufficientPoints,
  kNoConvergence,
  kNoOverlap,
  kFlatObjective,
  kBehindCamera,
  kPoseMeshMismatch,
  kSequenceTooShort,
  kEmptyMesh,
  kParseError,
  kMissingFrame,
  kPoseCountMismatch,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Domain error carrying a machine-readable code. Every failure the library
// reports to callers goes through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sixdof

#endif  // SIXDOF_ERROR_H_

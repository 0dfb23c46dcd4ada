// SPDX-License-Identifier: MIT

#include "sixdof/error.h"

namespace sixdof {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kFlatObjective: return "FlatObjective";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kPoseMeshMismatch: return "PoseMeshMismatch";
    case ErrorCode::kSequenceTooShort: return "SequenceTooShort";
    case ErrorCode::kEmptyMesh: return "EmptyMesh";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingFrame: return "MissingFrame";
    case ErrorCode::kPoseCountMismatch: return "PoseCountMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sixdof

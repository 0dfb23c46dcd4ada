// SPDX-License-Identifier: MIT

#ifndef SIXDOF_SEQUENCE_H_
#define SIXDOF_SEQUENCE_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/pose.h"

namespace sixdof {

enum class StabilityVariant { kNear, kFar, kOccluded };
enum class OccluderOrientation { kHorizontal, kVertical };
enum class InteractionVariant { kTranslationOnly, kRotationOnly, kFreeSlow, kFreeHard };

struct StabilityScenario {
  StabilityVariant variant = StabilityVariant::kNear;
  bool operator==(const StabilityScenario&) const = default;
};

struct OcclusionScenario {
  // One of 0, 15, 30, 45, 60, 75.
  int percent = 0;
  OccluderOrientation occluder = OccluderOrientation::kHorizontal;
  bool operator==(const OcclusionScenario&) const = default;
};

struct InteractionScenario {
  InteractionVariant variant = InteractionVariant::kFreeSlow;
  bool operator==(const InteractionScenario&) const = default;
};

using ScenarioKind = std::variant<StabilityScenario, OcclusionScenario, InteractionScenario>;

// Throws Error(kInvalidArgument) for occlusion percents outside the set.
void validate_scenario(const ScenarioKind& scenario);

// Textual forms: "stability/near", "occlusion/30/horizontal",
// "interaction/free_hard".
std::string to_string(const ScenarioKind& scenario);
// Throws Error(kParseError) on malformed input.
ScenarioKind parse_scenario(std::string_view text);
// "stability", "occlusion" or "interaction".
std::string_view scenario_family(const ScenarioKind& scenario);

// Retroreflective markers in the object frame.
struct MarkerSet {
  std::vector<Vec3> positions;
  double diameter_mm = 3.0;

  void validate() const;
};

struct Frame {
  DepthImage depth;
  std::optional<RgbImage> rgb;
  double timestamp_ms = 0.0;
  // Ground truth; never handed to trackers.
  Pose gt_pose;
};

struct Sequence {
  std::vector<Frame> frames;
  ScenarioKind scenario;
  std::string object_id;
  Intrinsics intrinsics;
  std::optional<MarkerSet> markers;

  // Throws on an empty sequence, non-monotone timestamps or depth images whose
  // size disagrees with the intrinsics.
  void validate() const;
  std::vector<Pose> ground_truth() const;
};

}  // namespace sixdof

#endif  // SIXDOF_SEQUENCE_H_

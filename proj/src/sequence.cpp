// SPDX-License-Identifier: MIT

#include "sixdof/sequence.h"

#include <algorithm>
#include <array>
#include <charconv>

#include "sixdof/error.h"

namespace sixdof {
namespace {

constexpr std::array<int, 6> kOcclusionPercents{0, 15, 30, 45, 60, 75};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_scenario(std::string_view text) {
  throw Error(ErrorCode::kParseError, "unknown scenario '" + std::string(text) + "'");
}

}  // namespace

void validate_scenario(const ScenarioKind& scenario) {
  if (const auto* occ = std::get_if<OcclusionScenario>(&scenario)) {
    if (std::find(kOcclusionPercents.begin(), kOcclusionPercents.end(), occ->percent) ==
        kOcclusionPercents.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "occlusion percent must be one of 0, 15, 30, 45, 60, 75");
    }
  }
}

std::string_view scenario_family(const ScenarioKind& scenario) {
  switch (scenario.index()) {
    case 0: return "stability";
    case 1: return "occlusion";
    default: return "interaction";
  }
}

std::string to_string(const ScenarioKind& scenario) {
  struct Visitor {
    std::string operator()(const StabilityScenario& s) const {
      switch (s.variant) {
        case StabilityVariant::kNear: return "stability/near";
        case StabilityVariant::kFar: return "stability/far";
        case StabilityVariant::kOccluded: return "stability/occluded";
      }
      return "stability/near";
    }
    std::string operator()(const OcclusionScenario& s) const {
      return "occlusion/" + std::to_string(s.percent) +
             (s.occluder == OccluderOrientation::kHorizontal ? "/horizontal" : "/vertical");
    }
    std::string operator()(const InteractionScenario& s) const {
      switch (s.variant) {
        case InteractionVariant::kTranslationOnly: return "interaction/translation_only";
        case InteractionVariant::kRotationOnly: return "interaction/rotation_only";
        case InteractionVariant::kFreeSlow: return "interaction/free_slow";
        case InteractionVariant::kFreeHard: return "interaction/free_hard";
      }
      return "interaction/free_slow";
    }
  };
  return std::visit(Visitor{}, scenario);
}

ScenarioKind parse_scenario(std::string_view text) {
  const auto parts = split(text, '/');
  if (parts[0] == "stability" && parts.size() == 2) {
    if (parts[1] == "near") return StabilityScenario{StabilityVariant::kNear};
    if (parts[1] == "far") return StabilityScenario{StabilityVariant::kFar};
    if (parts[1] == "occluded") return StabilityScenario{StabilityVariant::kOccluded};
  } else if (parts[0] == "occlusion" && (parts.size() == 2 || parts.size() == 3)) {
    int percent = -1;
    const auto [ptr, ec] =
        std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), percent);
    if (ec != std::errc() || ptr != parts[1].data() + parts[1].size()) bad_scenario(text);
    OcclusionScenario occ{percent, OccluderOrientation::kHorizontal};
    if (parts.size() == 3) {
      if (parts[2] == "vertical") {
        occ.occluder = OccluderOrientation::kVertical;
      } else if (parts[2] != "horizontal") {
        bad_scenario(text);
      }
    }
    try {
      validate_scenario(occ);
    } catch (const Error&) {
      bad_scenario(text);
    }
    return occ;
  } else if (parts[0] == "interaction" && parts.size() == 2) {
    if (parts[1] == "translation_only") return InteractionScenario{InteractionVariant::kTranslationOnly};
    if (parts[1] == "rotation_only") return InteractionScenario{InteractionVariant::kRotationOnly};
    if (parts[1] == "free_slow") return InteractionScenario{InteractionVariant::kFreeSlow};
    if (parts[1] == "free_hard") return InteractionScenario{InteractionVariant::kFreeHard};
  }
  bad_scenario(text);
}

void MarkerSet::validate() const {
  if (positions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "marker set is empty");
  }
  if (!(diameter_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "marker diameter must be positive");
  }
}

void Sequence::validate() const {
  if (frames.empty()) throw Error(ErrorCode::kMissingFrame, "sequence has no frames");
  intrinsics.validate();
  validate_scenario(scenario);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (f.depth.width() != intrinsics.width || f.depth.height() != intrinsics.height) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frame " + std::to_string(i) + " depth size does not match intrinsics");
    }
    if (i > 0 && !(f.timestamp_ms > frames[i - 1].timestamp_ms)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "timestamps must increase (frame " + std::to_string(i) + ")");
    }
  }
  if (markers) markers->validate();
}

std::vector<Pose> Sequence::ground_truth() const {
  std::vector<Pose> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.gt_pose);
  return out;
}

}  // namespace sixdof

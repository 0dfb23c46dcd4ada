// SPDX-License-Identifier: MIT

#include "sixdof/marker_repair.h"

#include <algorithm>
#include <cmath>

#include "sixdof/error.h"
#include "sixdof/parallel.h"
#include "sixdof/random.h"
#include "sixdof/render.h"

namespace sixdof {

PixelWindow marker_window(const Vec2& pixel, int size, int width, int height) {
  const int cx = static_cast<int>(std::floor(pixel.x()));
  const int cy = static_cast<int>(std::floor(pixel.y()));
  PixelWindow w;
  w.x0 = std::max(cx - size / 2, 0);
  w.y0 = std::max(cy - size / 2, 0);
  w.x1 = std::min(cx - size / 2 + size, width);
  w.y1 = std::min(cy - size / 2 + size, height);
  return w;
}

namespace {

std::optional<double> window_median(const DepthImage& depth, const PixelWindow& w, int size) {
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(size) * size);
  for (int y = w.y0; y < w.y1; ++y) {
    for (int x = w.x0; x < w.x1; ++x) {
      const float d = depth.at(x, y);
      if (d > 0.0f) values.push_back(d);
    }
  }
  // Pixels clipped by the border count as invalid.
  if (values.empty() || 2 * values.size() < static_cast<std::size_t>(size) * size) {
    return std::nullopt;
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

}  // namespace

RepairResult repair_frame(const DepthImage& depth, const Pose& pose, const Mesh& mesh,
                          const MarkerSet& markers, const Intrinsics& k,
                          const RepairOptions& options, std::uint64_t seed,
                          const DepthImage* clean) {
  markers.validate();
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw Error(ErrorCode::kInvalidArgument, "depth size does not match intrinsics");
  }
  if (options.window_px < 1 || options.noise_sigma_mm < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid repair options");
  }
  const DepthImage rendered = render_depth(mesh, pose, k);
  const std::size_t object_pixels = count_nonzero(rendered);
  if (object_pixels > 0) {
    std::size_t overlap = 0;
    for (std::size_t i = 0; i < rendered.size(); ++i) {
      if (rendered.data()[i] > 0.0f && depth.data()[i] > 0.0f) ++overlap;
    }
    if (static_cast<double>(overlap) < options.min_mask_overlap * object_pixels) {
      throw Error(ErrorCode::kPoseMeshMismatch,
                  "rendered object barely overlaps observed depth; pose or mesh is wrong");
    }
  }

  RepairResult result{depth, {}};
  RepairReport& report = result.report;
  report.markers_total = static_cast<int>(markers.positions.size());
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Mask patched(k.width, k.height, 0);

  for (const Vec3& marker : markers.positions) {
    const Vec3 pc = pose.apply(marker);
    if (pc.z() <= 0.0) continue;
    const Projection proj = project(pc, k);
    if (!k.contains(proj.pixel)) continue;
    const PixelWindow w = marker_window(proj.pixel, options.window_px, k.width, k.height);
    // The median is taken on the input frame so that overlapping windows do
    // not influence each other.
    const auto median = window_median(depth, w, options.window_px);
    if (!median || std::abs(*median - proj.depth_mm) >= options.visibility_threshold_mm) {
      continue;
    }
    ++report.markers_visible;
    bool any = false;
    for (int y = w.y0; y < w.y1; ++y) {
      for (int x = w.x0; x < w.x1; ++x) {
        const float r = rendered.at(x, y);
        if (r <= 0.0f) continue;
        const double n = options.noise_sigma_mm > 0.0 ? options.noise_sigma_mm * noise(rng) : 0.0;
        result.depth.at(x, y) = static_cast<float>(std::max(r + n, 0.0));
        patched.at(x, y) = 1;
        any = true;
      }
    }
    if (any) ++report.markers_patched;
  }

  report.pixels_patched = count_nonzero(patched);
  report.fraction_object_pixels_patched =
      object_pixels > 0 ? static_cast<double>(report.pixels_patched) / object_pixels : 0.0;

  if (clean != nullptr) {
    if (clean->width() != k.width || clean->height() != k.height) {
      throw Error(ErrorCode::kInvalidArgument, "reference size does not match intrinsics");
    }
    double before = 0.0, after = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < patched.size(); ++i) {
      if (!patched.data()[i]) continue;
      const double ref = clean->data()[i];
      before += std::pow(depth.data()[i] - ref, 2);
      after += std::pow(result.depth.data()[i] - ref, 2);
      ++n;
    }
    if (n > 0) {
      report.rmse_before_mm = std::sqrt(before / n);
      report.rmse_after_mm = std::sqrt(after / n);
    }
  }
  return result;
}

std::vector<RepairReport> repair_sequence(Sequence& sequence, const Mesh& mesh,
                                          const MarkerSet& markers,
                                          const RepairOptions& options, std::uint64_t seed,
                                          int jobs) {
  std::vector<RepairReport> reports(sequence.frames.size());
  parallel_for(sequence.frames.size(), jobs, [&](std::size_t i) {
    Frame& f = sequence.frames[i];
    RepairResult r = repair_frame(f.depth, f.gt_pose, mesh, markers, sequence.intrinsics,
                                  options, derive_seed(seed, i));
    f.depth = std::move(r.depth);
    reports[i] = r.report;
  });
  return reports;
}

}  // namespace sixdof

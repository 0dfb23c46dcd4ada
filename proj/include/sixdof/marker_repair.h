// SPDX-License-Identifier: MIT

#ifndef SIXDOF_MARKER_REPAIR_H_
#define SIXDOF_MARKER_REPAIR_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/mesh.h"
#include "sixdof/sequence.h"

namespace sixdof {

struct RepairOptions {
  int window_px = 10;
  double visibility_threshold_mm = 10.0;
  double noise_sigma_mm = 2.0;
  // Minimum share of the rendered mask that must land on valid observed depth.
  double min_mask_overlap = 0.1;
};

struct RepairReport {
  int markers_total = 0;
  int markers_visible = 0;
  int markers_patched = 0;
  std::size_t pixels_patched = 0;
  double fraction_object_pixels_patched = 0.0;
  std::optional<double> rmse_before_mm;
  std::optional<double> rmse_after_mm;
};

struct RepairResult {
  DepthImage depth;
  RepairReport report;
};

// Square window of `size` pixels around the pixel containing `pixel`, clipped
// to the image. Columns span [floor(u) - size/2, floor(u) + size - size/2).
struct PixelWindow {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};
PixelWindow marker_window(const Vec2& pixel, int size, int width, int height);

// Replaces the depth around every visible marker with the rendered model
// depth plus N(0, sigma^2) noise. Pixels outside the marker windows and
// background pixels inside them are left untouched. When `clean` is given,
// the report carries RMSE against it over the patched pixels.
//
// Throws Error(kPoseMeshMismatch) when less than `min_mask_overlap` of the
// rendered object lands on valid observed depth.
RepairResult repair_frame(const DepthImage& depth, const Pose& pose, const Mesh& mesh,
                          const MarkerSet& markers, const Intrinsics& k,
                          const RepairOptions& options, std::uint64_t seed,
                          const DepthImage* clean = nullptr);

// Repairs every frame in place using the ground-truth poses. Frame i draws
// its noise from derive_seed(seed, i), so results do not depend on `jobs`.
std::vector<RepairReport> repair_sequence(Sequence& sequence, const Mesh& mesh,
                                          const MarkerSet& markers,
                                          const RepairOptions& options, std::uint64_t seed,
                                          int jobs);

}  // namespace sixdof

#endif  // SIXDOF_MARKER_REPAIR_H_

// SPDX-License-Identifier: MIT

#ifndef SIXDOF_SAMPLER_H_
#define SIXDOF_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/mesh.h"
#include "sixdof/random.h"

namespace sixdof {

enum class PerturbationMode { kSpherical, kUniformComponent };

struct PerturbationConfig {
  double delta_t_mm = 0.0;
  double delta_r_deg = 0.0;
  PerturbationMode mode = PerturbationMode::kSpherical;

  void validate() const;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Unit vector with polar angle acos(x) and azimuth theta (radians).
Vec3 direction_from(double theta, double x);
// theta ~ U(-pi, pi), x ~ U(-1, 1); uniform on the unit sphere.
Vec3 sample_direction(Rng& rng);

// Spherical mode: translation = direction * m_t, m_t ~ N(0, delta_t^2), and a
// rotation of angle m_r ~ N(0, delta_r^2) about an independent uniform axis.
// Uniform-component mode: each translation component ~ U(-delta_t, delta_t)
// and each Euler angle ~ U(-delta_r, delta_r).
Pose sample_perturbation(const PerturbationConfig& config, Rng& rng);

// Labels encode gt relative to pred as
//   t_gt = t_pred + label[0..2]
//   R_gt = R_pred * euler_to_rotation(label[3..5])
// with Euler angles in degrees.
Vec6 label_between(const Pose& pred, const Pose& gt);
Pose apply_label(const Pose& pred, const Vec6& label);
// The perturbation pose delta that a label stands for.
Pose label_to_delta(const Vec6& label);
Vec6 delta_to_label(const Pose& delta);

struct PosePair {
  Pose pose_gt;
  Pose pose_pred;
  Vec6 label = Vec6::Zero();
};

// Emits pairs one at a time; memory use does not grow with the pair count.
// Pair i uses ground truth base_poses[i % size] and its own derived stream,
// so a pair can be regenerated from (seed, i) alone.
class PairGenerator {
 public:
  PairGenerator(std::vector<Pose> base_poses, PerturbationConfig config, std::uint64_t seed);

  PosePair pair(std::uint64_t index) const;
  PosePair next() { return pair(index_++); }
  std::uint64_t index() const { return index_; }

 private:
  std::vector<Pose> base_poses_;
  PerturbationConfig config_;
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

struct CropOptions {
  int size_px = 150;
  // Crop side relative to the object's largest dimension.
  double scale = 1.3;
};

// Intrinsics of a square crop centred on the projection of `center_camera`
// and spanning scale * diameter_mm at that depth.
Intrinsics crop_intrinsics(const Intrinsics& k, const Vec3& center_camera, double diameter_mm,
                           const CropOptions& options);

struct RenderedPair {
  DepthImage depth_gt;
  DepthImage depth_pred;
  Intrinsics crop;
};

// Both renderings share the crop anchored at the predicted pose.
RenderedPair render_pair(const Mesh& mesh, const PosePair& pair, const Intrinsics& k,
                         const CropOptions& options);

struct PairSinkItem {
  std::uint64_t index;
  const PosePair& pair;
  const RenderedPair* rendered;  // null unless rendering was requested
};

// Streams n pairs into `sink`. Rendering is enabled when `mesh` is non-null.
void generate_pairs(const std::vector<Pose>& base_poses, const PerturbationConfig& config,
                    std::uint64_t n, std::uint64_t seed,
                    const std::function<void(const PairSinkItem&)>& sink,
                    const Mesh* mesh = nullptr, const Intrinsics* k = nullptr,
                    const CropOptions& crop = {});

}  // namespace sixdof

#endif  // SIXDOF_SAMPLER_H_

// SPDX-License-Identifier: MIT

#ifndef SIXDOF_RENDER_H_
#define SIXDOF_RENDER_H_

#include <cstddef>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/mesh.h"

namespace sixdof {

// Z-buffered rasterization of `mesh` placed at `pose` (object -> camera).
// Each pixel holds the camera-frame z (mm) of the nearest surface hit by the
// ray through the pixel center, or 0 when nothing is hit. Geometry in front of
// the near plane (z < 1 mm) is clipped.
DepthImage render_depth(const Mesh& mesh, const Pose& pose, const Intrinsics& k);

// Pixel set where render_depth() is nonzero.
Mask render_mask(const Mesh& mesh, const Pose& pose, const Intrinsics& k);

Mask mask_from_depth(const DepthImage& depth);
std::size_t count_nonzero(const Mask& mask);
std::size_t count_nonzero(const DepthImage& depth);

}  // namespace sixdof

#endif  // SIXDOF_RENDER_H_

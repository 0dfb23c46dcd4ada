// SPDX-License-Identifier: MIT

#ifndef SIXDOF_IMAGE_IO_H_
#define SIXDOF_IMAGE_IO_H_

#include <filesystem>

#include "sixdof/image.h"

namespace sixdof {

// 16-bit grayscale PNG, one unit = 1 mm, 0 = invalid. Depths are rounded to
// the nearest millimetre and saturate at 65535.
void write_depth_png(const std::filesystem::path& path, const DepthImage& depth);
DepthImage read_depth_png(const std::filesystem::path& path);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& rgb);
RgbImage read_rgb_png(const std::filesystem::path& path);

}  // namespace sixdof

#endif  // SIXDOF_IMAGE_IO_H_

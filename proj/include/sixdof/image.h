// SPDX-License-Identifier: MIT

#ifndef SIXDOF_IMAGE_H_
#define SIXDOF_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sixdof {

// Row-major single-channel image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Depth in mm; 0 marks no return / background.
using DepthImage = Image<float>;
using Mask = Image<std::uint8_t>;

// Interleaved 8-bit RGB.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
  bool operator==(const RgbImage& other) const = default;
};

}  // namespace sixdof

#endif  // SIXDOF_IMAGE_H_

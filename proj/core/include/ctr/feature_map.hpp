#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctr/geometry.hpp"

namespace ctr {

enum class Channel : int { Text = 0, RadiusKernel = 1, RadiusEdge = 2, Alpha = 3, Q1 = 4, Q2 = 5 };

/// Per-pixel 6-channel geometric feature tensor. Plane-major storage, rows
/// top-to-bottom like the on-disk layout; pixel centers live in the internal
/// y-up frame. Background pixels carry text = 0 and -1 in the other channels.
class GeoFeatureMap {
public:
  static constexpr int kChannels = 6;

  GeoFeatureMap() = default;
  GeoFeatureMap(int width, int height)
      : width_(width), height_(height),
        data_(std::size_t(kChannels) * width * height, 0.0f) {
    const std::size_t plane = std::size_t(width_) * height_;
    for (int c = 1; c < kChannels; ++c)
      for (std::size_t i = 0; i < plane; ++i) data_[c * plane + i] = -1.0f;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  float at(Channel c, int row, int col) const { return data_[index(c, row, col)]; }
  float& at(Channel c, int row, int col) { return data_[index(c, row, col)]; }

  std::span<const float> plane(Channel c) const {
    const std::size_t p = std::size_t(width_) * height_;
    return {data_.data() + std::size_t(int(c)) * p, p};
  }

  std::span<const float> raw() const { return data_; }
  std::span<float> raw() { return data_; }

  /// Center of pixel (row, col) in the internal y-up frame (row 0 is the top).
  static Vec2 pixel_center(int row, int col, int height) {
    return {col + 0.5, height - row - 0.5};
  }
  /// Nearest pixel to an internal-frame point; may be out of bounds.
  static std::pair<int, int> nearest_pixel(Vec2 p, int height) {
    return {int(std::lround(height - p.y - 0.5)), int(std::lround(p.x - 0.5))};
  }

private:
  std::size_t index(Channel c, int row, int col) const {
    return (std::size_t(int(c)) * height_ + row) * width_ + col;
  }

  int width_ = 0, height_ = 0;
  std::vector<float> data_;
};

}  // namespace ctr

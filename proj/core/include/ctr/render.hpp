#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ctr/feature_map.hpp"

namespace ctr {

struct RgbImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // RGB8, row-major from the top
};

/// Grayscale heatmap of one channel, normalized over valid pixels; the -1
/// background sentinel renders as a distinct dark blue. Accepts the six
/// stored channels plus the derived "sin_theta" and "cos_theta".
RgbImage render_channel(const GeoFeatureMap& map, std::string_view channel);

bool is_render_channel(std::string_view channel);

}  // namespace ctr

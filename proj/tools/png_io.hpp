#pragma once

#include <filesystem>

#include "ctr/render.hpp"

namespace ctr {

void write_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace ctr

#include "png_io.hpp"

#include <png.h>

#include <cstdio>
#include <vector>

#include "ctr/error.hpp"

namespace ctr {

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) raise(ErrorCode::IoError, "cannot open " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    raise(ErrorCode::IoError, "png writer setup failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    raise(ErrorCode::IoError, "png encode failed for " + path.string());
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, png_uint_32(image.width), png_uint_32(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_bytep> rows(image.height);
  for (int r = 0; r < image.height; ++r)
    rows[r] = const_cast<png_bytep>(&image.pixels[std::size_t(3) * image.width * r]);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace ctr

#include "ctr/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctr/error.hpp"
#include "ctr/labelgen.hpp"

namespace ctr {

namespace {

constexpr std::uint8_t kSentinel[3] = {24, 24, 112};

enum class Kind { Stored, SinTheta, CosTheta };

struct ChannelRef {
  Kind kind = Kind::Stored;
  Channel channel = Channel::Text;
};

bool parse_channel(std::string_view name, ChannelRef& spec) {
  const std::string n(name);
  if (n == "text") { spec = {Kind::Stored, Channel::Text}; return true; }
  if (n == "r_k") { spec = {Kind::Stored, Channel::RadiusKernel}; return true; }
  if (n == "r_e") { spec = {Kind::Stored, Channel::RadiusEdge}; return true; }
  if (n == "alpha") { spec = {Kind::Stored, Channel::Alpha}; return true; }
  if (n == "q1") { spec = {Kind::Stored, Channel::Q1}; return true; }
  if (n == "q2") { spec = {Kind::Stored, Channel::Q2}; return true; }
  if (n == "sin_theta") { spec = {Kind::SinTheta}; return true; }
  if (n == "cos_theta") { spec = {Kind::CosTheta}; return true; }
  return false;
}

}  // namespace

bool is_render_channel(std::string_view channel) {
  ChannelRef s;
  return parse_channel(channel, s);
}

RgbImage render_channel(const GeoFeatureMap& map, std::string_view channel) {
  ChannelRef spec;
  if (!parse_channel(channel, spec))
    raise(ErrorCode::FormatError, "unknown render channel: " + std::string(channel));

  const int w = map.width(), h = map.height();
  RgbImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(std::size_t(3) * w * h, 0);

  std::vector<double> value(std::size_t(w) * h, 0.0);
  std::vector<char> valid(std::size_t(w) * h, 0);
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const std::size_t idx = std::size_t(row) * w + col;
      const bool background = map.at(Channel::Alpha, row, col) == -1.0f &&
                              map.at(Channel::Q1, row, col) == -1.0f &&
                              map.at(Channel::Q2, row, col) == -1.0f;
      double v = 0.0;
      bool ok = true;
      switch (spec.kind) {
        case Kind::Stored:
          v = map.at(spec.channel, row, col);
          ok = spec.channel == Channel::Text || !background;
          break;
        case Kind::SinTheta:
        case Kind::CosTheta: {
          if (background) { ok = false; break; }
          const double alpha = map.at(Channel::Alpha, row, col);
          const int q1 = map.at(Channel::Q1, row, col) >= 0.5f ? 1 : 0;
          const int q2 = map.at(Channel::Q2, row, col) >= 0.5f ? 1 : 0;
          const double theta = decode_angle(alpha, q1, q2);
          v = spec.kind == Kind::SinTheta ? std::sin(theta) : std::cos(theta);
          break;
        }
      }
      if (!ok) continue;
      valid[idx] = 1;
      value[idx] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t idx = 0; idx < valid.size(); ++idx) {
    std::uint8_t* px = &img.pixels[3 * idx];
    if (!valid[idx]) {
      px[0] = kSentinel[0];
      px[1] = kSentinel[1];
      px[2] = kSentinel[2];
      continue;
    }
    const double t = hi > lo ? (value[idx] - lo) / span : 0.5;
    const auto g = std::uint8_t(std::clamp(t, 0.0, 1.0) * 255.0 + 0.5);
    px[0] = px[1] = px[2] = g;
  }
  return img;
}

}  // namespace ctr

#include "ctr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ctr/error.hpp"
#include "ctr/rng.hpp"

namespace ctr {

namespace {
constexpr double kPi = std::numbers::pi;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

GeoFeatureMap perturb(const GeoFeatureMap& labels, const NoiseConfig& config) {
  GeoFeatureMap out = labels;
  Rng rng(Rng::mix(config.seed, 0xb10b));
  const int w = labels.width(), h = labels.height();

  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (labels.at(Channel::Text, row, col) < 0.5f) continue;
      if (config.sigma_r > 0.0) {
        auto& rk = out.at(Channel::RadiusKernel, row, col);
        auto& re = out.at(Channel::RadiusEdge, row, col);
        rk = float(std::max(0.0, rk + config.sigma_r * rng.gaussian()));
        re = float(std::max(0.0, re + config.sigma_r * rng.gaussian()));
      }
      if (config.sigma_alpha > 0.0) {
        auto& a = out.at(Channel::Alpha, row, col);
        a = float(std::clamp(a + config.sigma_alpha * rng.gaussian(), 0.0, kPi / 2.0));
      }
      if (config.flip_prob > 0.0) {
        if (rng.bernoulli(config.flip_prob)) {
          auto& q = out.at(Channel::Q1, row, col);
          q = q >= 0.5f ? 0.0f : 1.0f;
        }
        if (rng.bernoulli(config.flip_prob)) {
          auto& q = out.at(Channel::Q2, row, col);
          q = q >= 0.5f ? 0.0f : 1.0f;
        }
      }
      if (config.conf_blur > 0.0)
        out.at(Channel::Text, row, col) =
            float(logistic(0.5 / config.conf_blur + rng.gaussian()));
    }
  }

  if (config.spurious_blob_rate > 0.0) {
    const int blobs = rng.poisson(config.spurious_blob_rate);
    for (int b = 0; b < blobs; ++b) {
      bool placed = false;
      for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
        const double cx = rng.uniform(0.0, double(w));
        const double cy = rng.uniform(0.0, double(h));
        const double radius = rng.uniform(2.0, 6.0);
        const int cc = int(cx), cr = int(cy);
        const int guard = int(radius) + 8;
        bool clear = true;
        for (int r = cr - guard; r <= cr + guard && clear; ++r)
          for (int c = cc - guard; c <= cc + guard && clear; ++c)
            if (labels.in_bounds(r, c) && labels.at(Channel::Text, r, c) >= 0.5f) clear = false;
        if (!clear) continue;
        placed = true;

        const float conf = float(rng.uniform(0.65, 0.9));
        const float rk = float(rng.uniform(0.5, 5.0));
        const float re = float(rng.uniform(0.5, 5.0));
        const float alpha = float(rng.uniform(0.0, kPi / 2.0));
        const float q1 = rng.bernoulli(0.5) ? 1.0f : 0.0f;
        const float q2 = rng.bernoulli(0.5) ? 1.0f : 0.0f;
        const int ir = int(radius) + 1;
        for (int r = cr - ir; r <= cr + ir; ++r) {
          for (int c = cc - ir; c <= cc + ir; ++c) {
            if (!out.in_bounds(r, c)) continue;
            const double dr = r + 0.5 - cy, dc = c + 0.5 - cx;
            if (dr * dr + dc * dc > radius * radius) continue;
            out.at(Channel::Text, r, c) = conf;
            out.at(Channel::RadiusKernel, r, c) = rk;
            out.at(Channel::RadiusEdge, r, c) = re;
            out.at(Channel::Alpha, r, c) = alpha;
            out.at(Channel::Q1, r, c) = q1;
            out.at(Channel::Q2, r, c) = q2;
          }
        }
      }
    }
  }
  return out;
}

Polygon generate_ribbon(const RibbonParams& params) {
  if (params.width <= 0.0 || params.height <= 0.0)
    raise(ErrorCode::SelfIntersectingParams, "ribbon dimensions must be positive");
  const int n = std::max(2, params.boundary_points);
  Rng rng(Rng::mix(params.seed, 0x51bb0));

  // jittered arc-length fractions shared by both long sides
  std::vector<double> frac(n);
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    if (i > 0 && i + 1 < n) t += 0.25 * (rng.uniform() - 0.5) / (n - 1);
    frac[i] = t;
  }

  std::vector<Vec2> pts;
  pts.reserve(2 * n);
  if (std::abs(params.curvature) < 1e-9) {
    for (int i = 0; i < n; ++i) pts.push_back({params.width * frac[i], params.height});
    for (int i = n - 1; i >= 0; --i) pts.push_back({params.width * frac[i], 0.0});
  } else {
    const double phi = params.curvature;
    if (phi >= 1.9 * kPi)
      raise(ErrorCode::SelfIntersectingParams, "curvature closes the ribbon on itself");
    const double radius = params.width / phi;
    if (params.height / 2.0 >= radius)
      raise(ErrorCode::SelfIntersectingParams, "inner radius collapses at this curvature");
    const double r_out = radius + params.height / 2.0;
    const double r_in = radius - params.height / 2.0;
    const double a0 = kPi / 2.0 + phi / 2.0;  // left end, sweeping right = decreasing angle
    for (int i = 0; i < n; ++i) {
      const double a = a0 - phi * frac[i];
      pts.push_back({r_out * std::cos(a), r_out * std::sin(a)});
    }
    for (int i = n - 1; i >= 0; --i) {
      const double a = a0 - phi * frac[i];
      pts.push_back({r_in * std::cos(a), r_in * std::sin(a)});
    }
  }

  const std::array<std::size_t, 4> corners = {0, std::size_t(n - 1), std::size_t(n),
                                              std::size_t(2 * n - 1)};
  Polygon poly = validate_polygon(pts, corners);
  // shift into the positive quadrant with a small margin
  const Vec2 lo = poly.bbox_min();
  return transform_polygon(poly, 0.0, {1.0 - lo.x, 1.0 - lo.y});
}

}  // namespace ctr

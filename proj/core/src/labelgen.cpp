#include "ctr/labelgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "ctr/error.hpp"

namespace ctr {

namespace {
constexpr double kPi = std::numbers::pi;

double normalize_angle(double theta) {
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
  if (theta >= 2.0 * kPi) theta = 0.0;
  return theta;
}
}  // namespace

KernelGeometry kernel_segment(double width, double height) {
  KernelGeometry kg;
  kg.width = width;
  kg.height = height;
  if (height < width) {
    kg.a = {height / 2.0, height / 2.0};
    kg.b = {width - height / 2.0, height / 2.0};
  } else {
    kg.a = kg.b = {width / 2.0, height / 2.0};
  }
  return kg;
}

CtrOffsets offsets_in_ctr(Vec2 p, const KernelGeometry& kg) {
  Vec2 pk;
  if (kg.is_point()) {
    pk = kg.a;
  } else {
    pk = {std::clamp(p.x, kg.a.x, kg.b.x), kg.a.y};
  }

  Vec2 dir = p - pk;
  const double len = dir.norm();
  if (len <= 1e-12 * std::max(kg.width, kg.height)) {
    dir = {0.0, -1.0};  // point on the kernel: ray points straight down
  } else {
    dir = dir / len;
  }

  // first exit of the ray from pk through p out of [0,w] x [0,h]
  double t_exit = std::numeric_limits<double>::max();
  if (dir.x > 0.0) t_exit = std::min(t_exit, (kg.width - pk.x) / dir.x);
  if (dir.x < 0.0) t_exit = std::min(t_exit, -pk.x / dir.x);
  if (dir.y > 0.0) t_exit = std::min(t_exit, (kg.height - pk.y) / dir.y);
  if (dir.y < 0.0) t_exit = std::min(t_exit, -pk.y / dir.y);
  const Vec2 pe = pk + dir * t_exit;

  return {pk - p, pe - p};
}

PixelGeo pull_back_offsets(const Ctr& ctr, Vec2 p) {
  const Vec2 p_img = ctr.forward(p);
  const KernelGeometry kg = kernel_segment(ctr.width(), ctr.height());
  const CtrOffsets off = offsets_in_ctr(p_img, kg);

  const Vec2 src_pk = ctr.inverse(p_img + off.vk);
  const Vec2 src_pe = ctr.inverse(p_img + off.ve);
  const Vec2 vk = src_pk - p;
  const Vec2 ve = src_pe - p;

  PixelGeo geo;
  geo.r_k = vk.norm();
  geo.r_e = ve.norm();
  const double eps = 1e-9 * std::max(1.0, ctr.unit_map().mesh().diameter());
  // colinearity: when the kernel offset degenerates, take the axis from -ve
  const Vec2 axis = geo.r_k > eps ? vk : -ve;
  geo.theta = axis.norm() > 0.0 ? normalize_angle(std::atan2(axis.y, axis.x)) : 0.0;
  if (geo.r_k > eps && geo.r_e > eps) {
    const double cosang =
        std::clamp(dot(vk, -ve) / (geo.r_k * geo.r_e), -1.0, 1.0);
    geo.colinearity_dev = std::acos(cosang);
  }
  return geo;
}

AngleCode encode_angle(double theta) {
  theta = normalize_angle(theta);
  const int k = std::min(3, int(theta / (kPi / 2.0)));
  switch (k) {
    case 0: return {theta, 0, 0};
    case 1: return {kPi - theta, 1, 0};
    case 2: return {theta - kPi, 0, 1};
    default: return {2.0 * kPi - theta, 1, 1};
  }
}

double decode_angle(double alpha, int q1, int q2) {
  alpha = std::clamp(alpha, 0.0, kPi / 2.0);
  const double theta = (q1 ? -1.0 : 1.0) * alpha + (q1 + q2) * kPi;
  return normalize_angle(theta);
}

std::pair<double, double> encode_sincos(double theta) { return {std::sin(theta), std::cos(theta)}; }

double decode_sincos(double s, double c) {
  if (s == 0.0 && c == 0.0) raise(ErrorCode::ZeroVector, "cannot decode the zero vector");
  return normalize_angle(std::atan2(s, c));
}

GeoFeatureMap rasterize_labels(int width, int height, std::span<const Polygon> instances,
                               const LabelConfig& config,
                               std::vector<InstanceDiagnostics>* diagnostics) {
  GeoFeatureMap map(width, height);
  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const Polygon& poly = instances[idx];
    InstanceDiagnostics diag;
    diag.index = int(idx);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Ctr ctr = build_ctr(poly, config.ctr);
      diag.w_c = ctr.width();
      diag.h_c = ctr.height();
      diag.flipped_triangles = ctr.unit_map().audit().flipped_triangles;

      const Vec2 lo = poly.bbox_min();
      const Vec2 hi = poly.bbox_max();
      const int col0 = std::max(0, int(std::floor(lo.x - 1.0)));
      const int col1 = std::min(width - 1, int(std::ceil(hi.x + 1.0)));
      const int row0 = std::max(0, int(std::floor(height - hi.y - 1.0)));
      const int row1 = std::min(height - 1, int(std::ceil(height - lo.y + 1.0)));
      double dev_sum = 0.0;
      std::size_t labeled = 0;
      for (int row = row0; row <= row1; ++row) {
        for (int col = col0; col <= col1; ++col) {
          const Vec2 p = GeoFeatureMap::pixel_center(row, col, height);
          if (!point_in_polygon(poly, p)) continue;
          const PixelGeo geo = pull_back_offsets(ctr, p);
          const AngleCode code = encode_angle(geo.theta);
          map.at(Channel::Text, row, col) = 1.0f;
          map.at(Channel::RadiusKernel, row, col) = float(geo.r_k);
          map.at(Channel::RadiusEdge, row, col) = float(geo.r_e);
          map.at(Channel::Alpha, row, col) = float(code.alpha);
          map.at(Channel::Q1, row, col) = float(code.q1);
          map.at(Channel::Q2, row, col) = float(code.q2);
          diag.max_colinearity_dev = std::max(diag.max_colinearity_dev, geo.colinearity_dev);
          dev_sum += geo.colinearity_dev;
          ++labeled;
        }
      }
      if (labeled > 0) diag.mean_colinearity_dev = dev_sum / double(labeled);
      diag.ok = true;
    } catch (const Error& e) {
      diag.ok = false;
      diag.error = e.what();
    }
    diag.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (diagnostics) diagnostics->push_back(diag);
  }
  return map;
}

}  // namespace ctr

#pragma once

#include <span>
#include <string>
#include <vector>

#include "ctr/feature_map.hpp"
#include "ctr/geometry.hpp"
#include "ctr/harmonic.hpp"

namespace ctr {

/// Kernel set inside a rectified region: the horizontal center segment inset
/// by height/2 when the region is wider than tall, otherwise its center point.
struct KernelGeometry {
  double width = 0.0, height = 0.0;
  Vec2 a{}, b{};  // segment endpoints (a == b for the point case)
  bool is_point() const { return a == b; }
};

KernelGeometry kernel_segment(double width, double height);

/// Offsets of a point inside the rectified region: vk points to the nearest
/// kernel point, ve to the boundary along the ray from that kernel point.
struct CtrOffsets {
  Vec2 vk{}, ve{};
};

CtrOffsets offsets_in_ctr(Vec2 p, const KernelGeometry& kg);

/// Per-pixel geometry pulled back into the source polygon. theta is the
/// direction of the kernel offset; the edge offset is folded onto the same
/// axis as (-r_e, theta). colinearity_dev records the angle between the two
/// pulled-back offsets before that folding.
struct PixelGeo {
  double r_k = 0.0, r_e = 0.0, theta = 0.0;
  double colinearity_dev = 0.0;  // radians
};

PixelGeo pull_back_offsets(const Ctr& ctr, Vec2 p);

struct AngleCode {
  double alpha = 0.0;  // reference angle in [0, pi/2]
  int q1 = 0, q2 = 0;  // quadrant bits
};

AngleCode encode_angle(double theta);
double decode_angle(double alpha, int q1, int q2);

std::pair<double, double> encode_sincos(double theta);
double decode_sincos(double s, double c);  // ZeroVector on (0, 0)

struct LabelConfig {
  CtrConfig ctr;
};

struct InstanceDiagnostics {
  int index = 0;
  bool ok = false;
  double w_c = 0.0, h_c = 0.0;
  int flipped_triangles = 0;
  double solve_seconds = 0.0;
  double max_colinearity_dev = 0.0;   // radians, worst pixel
  double mean_colinearity_dev = 0.0;  // radians, over labeled pixels
  std::string error;
};

/// Rasterizes ground-truth labels for every instance; instances whose
/// rectification fails are skipped and reported through diagnostics.
GeoFeatureMap rasterize_labels(int width, int height, std::span<const Polygon> instances,
                               const LabelConfig& config = {},
                               std::vector<InstanceDiagnostics>* diagnostics = nullptr);

}  // namespace ctr

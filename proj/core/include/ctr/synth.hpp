#pragma once

#include <cstdint>

#include "ctr/feature_map.hpp"
#include "ctr/geometry.hpp"

namespace ctr {

/// Synthetic noise standing in for a segmentation network's prediction error.
struct NoiseConfig {
  double sigma_r = 0.0;             // gaussian std on r_k / r_e, px
  double sigma_alpha = 0.0;         // gaussian std on alpha, rad (clamped to [0, pi/2])
  double flip_prob = 0.0;           // per-bit inversion probability for q1 / q2
  double conf_blur = 0.0;           // logistic softening temperature for text confidence
  double spurious_blob_rate = 0.0;  // expected false-positive blobs per image
  std::uint64_t seed = 0;
};

/// Applies prediction-style noise to a crisp label map. Noise touches only
/// labeled pixels; spurious blobs stamp extra positive-confidence regions on
/// the background. Deterministic given the seed.
GeoFeatureMap perturb(const GeoFeatureMap& labels, const NoiseConfig& config);

struct RibbonParams {
  double width = 128.0;        // arc length of the centerline
  double height = 32.0;
  double curvature = 0.0;      // total swept angle in radians, 0 = straight
  int boundary_points = 24;    // samples per long side
  std::uint64_t seed = 0;      // jitters boundary spacing
};

/// Text-like ribbon: a rectangle swept along a circular arc, annotated with
/// its four reading-order corners. Always passes validate_polygon.
Polygon generate_ribbon(const RibbonParams& params);

}  // namespace ctr

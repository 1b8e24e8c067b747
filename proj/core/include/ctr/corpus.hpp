#pragma once

#include <cstdint>
#include <vector>

#include "ctr/geometry.hpp"
#include "ctr/synth.hpp"

namespace ctr {

/// Deterministic synthetic corpus: ribbons of varying aspect, curvature and
/// orientation placed without overlap into fixed-size images.
struct CorpusConfig {
  int images = 25;
  int width = 320;
  int height = 320;
  int min_instances = 1;
  int max_instances = 3;
  double min_aspect = 2.0;
  double max_aspect = 20.0;
  double min_height = 20.0;   // px
  double max_height = 48.0;   // px
  double max_curvature = 3.14159265358979323846;  // radians, drawn from [0, max]
  // text-like bend limit: total sweep <= cap * aspect keeps the bend radius
  // at a couple of text heights or more
  double curvature_aspect_cap = 0.45;
  bool rotate = true;
  int boundary_points = 24;
  std::uint64_t seed = 1;
};

struct CorpusImage {
  int width = 0, height = 0;
  std::vector<Polygon> instances;
};

std::vector<CorpusImage> build_corpus(const CorpusConfig& config);

}  // namespace ctr

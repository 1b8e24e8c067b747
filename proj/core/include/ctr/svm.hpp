#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ctr/geometry.hpp"

namespace ctr {

using Features = std::array<double, 3>;  // confidence, distortion, aspect ratio

/// RBF support-vector classifier over standardized features.
struct SvmModel {
  int version = 1;
  double C = 1.0;
  double gamma = 1.0;
  double bias = 0.0;
  std::vector<Features> support_vectors;   // standardized space
  std::vector<double> coefficients;        // label-signed dual coefficients
  Features feature_mean{0.0, 0.0, 0.0};
  Features feature_scale{1.0, 1.0, 1.0};
};

double rbf_kernel(const Features& x, const Features& y, double gamma);

/// Sequential minimal optimization with second-order working-set selection.
/// Deterministic given the sample order; features are standardized internally.
SvmModel train_smo(std::span<const Features> samples, std::span<const int> labels, double C,
                   double gamma, double tol = 1e-3, std::size_t max_iter = 1000000);

/// (label, decision value); exact zero decides positive.
std::pair<int, double> predict(const SvmModel& model, const Features& features);

struct CvEntry {
  double C = 0.0;
  double gamma = 0.0;
  double mean_accuracy = 0.0;
};

struct GridSearchResult {
  double best_C = 0.0;
  double best_gamma = 0.0;
  double best_accuracy = 0.0;
  std::vector<CvEntry> table;
};

inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
  return grid;
}
inline const std::vector<double>& default_gamma_grid() {
  static const std::vector<double> grid{1.0, 0.1, 0.001, 0.0001, 0.00001};
  return grid;
}

/// Stratified k-fold grid search; ties broken by smaller C, then smaller gamma.
GridSearchResult grid_search_cv(std::span<const Features> samples, std::span<const int> labels,
                                std::span<const double> c_grid, std::span<const double> gamma_grid,
                                int folds = 5, std::uint64_t seed = 0);

struct FilterDataset {
  std::vector<Features> samples;
  std::vector<int> labels;
};

struct LabeledDetection {
  Features features{};
  Polygon boundary;
};

/// Labels each detection +1 when its best ground-truth IoU reaches the
/// threshold, -1 otherwise.
void append_filter_dataset(std::span<const LabeledDetection> detections,
                           std::span<const Polygon> ground_truth, FilterDataset& out,
                           double iou_thresh = 0.5);

/// Per-image detections against per-image ground truth, flattened into one
/// training set.
FilterDataset build_filter_dataset(std::span<const std::vector<LabeledDetection>> detections,
                                   std::span<const std::vector<Polygon>> ground_truth,
                                   double iou_thresh = 0.5);

}  // namespace ctr

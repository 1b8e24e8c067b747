#pragma once

#include <span>
#include <vector>

#include "ctr/feature_map.hpp"
#include "ctr/geometry.hpp"
#include "ctr/svm.hpp"

namespace ctr {

struct PostprocConfig {
  double conf_thresh = 0.65;
  double cls_thresh = 0.5;
  double kernel_scale = 0.0;   // s in the s*h disk-stamping rule, h = 2(r_k + r_e)
  int connectivity = 8;
  int min_candidates = 10;     // clusters with fewer supporting pixels are dropped
  double simplify_tol = 0.8;   // contour deviation bound in px (contract allows up to 1)
  bool collect_debug = false;  // record kernel stamps in DetectResult
};

struct CandidatePixel {
  int row = 0, col = 0;
  double confidence = 0.0;
  double r_k = 0.0, r_e = 0.0;
  double alpha = 0.0;
  double theta = 0.0;  // decoded from (alpha, q1, q2)
};

/// Confidence gate plus crisp decoding of the classification channels.
std::vector<CandidatePixel> binarize(const GeoFeatureMap& map, double conf_thresh = 0.65,
                                     double cls_thresh = 0.5);

/// Kernel-point connected components; one cluster id per candidate, -1 for
/// candidates whose kernel point falls outside the image.
std::vector<int> cluster(std::span<const CandidatePixel> candidates, int width, int height,
                         double kernel_scale = 0.0, int connectivity = 8);

inline double kernel_disk_radius(double r_k, double r_e, double kernel_scale) {
  return kernel_scale * 2.0 * (r_k + r_e);
}

struct DetectedInstance {
  std::vector<int> pixels;            // linear row * width + col indices
  std::vector<int> source_candidate;  // generating candidate per pixel
  int cluster_id = -1;
  int candidate_count = 0;
  double mean_confidence = 0.0;
  double sigma_alpha = 0.0;
  double aspect_ratio = 0.0;
  Polygon boundary;
  double decision_value = 0.0;
  bool kept = true;
};

/// Restores full-height segments through every candidate and collects
/// per-cluster pixel masks. Candidate pixels always keep their own id.
std::vector<DetectedInstance> reconstruct(std::span<const CandidatePixel> candidates,
                                          std::span<const int> cluster_ids, int width, int height);

/// (mean confidence, alpha standard deviation, aspect estimate) over the mask,
/// with reconstructed-only pixels inheriting their generating candidate.
struct InstanceFeatures {
  double mean_confidence = 0.0;
  double sigma_alpha = 0.0;
  double aspect_ratio = 0.0;
};

InstanceFeatures instance_features(const DetectedInstance& inst,
                                   std::span<const CandidatePixel> candidates);

/// Outer contour of an 8-connected mask, traced on the pixel lattice and
/// simplified to the given maximum deviation.
Polygon mask_to_polygon(std::span<const int> pixels, int width, int height,
                        double simplify_tol = 1.0);

/// Keeps instances the model classifies positive; pass-through without model.
void filter_instances(std::vector<DetectedInstance>& instances, const SvmModel* model);

struct KernelStamp {
  int row = 0, col = 0;
  double radius = 0.0;
};

struct DetectResult {
  std::vector<DetectedInstance> instances;
  std::vector<KernelStamp> debug_stamps;
};

/// Full post-processing pipeline: binarize, cluster, size-gate, reconstruct,
/// features, contours, optional classifier filter.
DetectResult detect(const GeoFeatureMap& map, const PostprocConfig& config = {},
                    const SvmModel* model = nullptr);

}  // namespace ctr

#pragma once

#include <span>
#include <vector>

#include "ctr/geometry.hpp"

namespace ctr {

struct MatchPair {
  int pred = -1;
  int gt = -1;
  double iou = 0.0;
};

/// Greedy one-to-one matching in descending IoU order; pairs below the
/// threshold stay unmatched. Ties break toward the lower prediction index.
std::vector<MatchPair> match_detections(std::span<const Polygon> preds,
                                        std::span<const Polygon> gts, double iou_thresh = 0.5);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Precision defaults to 1 only when both sides are empty; recall is vacuously
/// 1 with no ground truth.
Prf prf(int matches, int n_preds, int n_gts);

struct ImageEval {
  int matches = 0;
  int preds = 0;
  int gts = 0;
  double min_matched_iou = 1.0;
};

struct EvalReport {
  std::vector<ImageEval> images;
  Prf overall;
  double iou_thresh = 0.5;
  int total_matches = 0, total_preds = 0, total_gts = 0;
};

EvalReport evaluate(std::span<const std::vector<Polygon>> preds,
                    std::span<const std::vector<Polygon>> gts, double iou_thresh = 0.5);

}  // namespace ctr

#include "ctr/evalkit.hpp"

#include <algorithm>

#include "ctr/error.hpp"

namespace ctr {

std::vector<MatchPair> match_detections(std::span<const Polygon> preds,
                                        std::span<const Polygon> gts, double iou_thresh) {
  std::vector<MatchPair> pairs;
  for (int p = 0; p < int(preds.size()); ++p) {
    for (int g = 0; g < int(gts.size()); ++g) {
      const double iou = polygon_iou(preds[p], gts[g]);
      if (iou >= iou_thresh) pairs.push_back({p, g, iou});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  std::vector<char> pred_used(preds.size(), 0), gt_used(gts.size(), 0);
  std::vector<MatchPair> matches;
  for (const MatchPair& pair : pairs) {
    if (pred_used[pair.pred] || gt_used[pair.gt]) continue;
    pred_used[pair.pred] = 1;
    gt_used[pair.gt] = 1;
    matches.push_back(pair);
  }
  return matches;
}

Prf prf(int matches, int n_preds, int n_gts) {
  Prf r;
  if (n_preds == 0)
    r.precision = n_gts == 0 ? 1.0 : 0.0;
  else
    r.precision = double(matches) / n_preds;
  if (n_gts == 0)
    r.recall = 1.0;
  else
    r.recall = double(matches) / n_gts;
  const double pr = r.precision + r.recall;
  r.f_measure = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
  return r;
}

EvalReport evaluate(std::span<const std::vector<Polygon>> preds,
                    std::span<const std::vector<Polygon>> gts, double iou_thresh) {
  if (preds.size() != gts.size())
    raise(ErrorCode::FormatError, "prediction and ground-truth image counts differ");
  EvalReport report;
  report.iou_thresh = iou_thresh;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto matches = match_detections(preds[i], gts[i], iou_thresh);
    ImageEval ie;
    ie.matches = int(matches.size());
    ie.preds = int(preds[i].size());
    ie.gts = int(gts[i].size());
    for (const MatchPair& m : matches) ie.min_matched_iou = std::min(ie.min_matched_iou, m.iou);
    report.images.push_back(ie);
    report.total_matches += ie.matches;
    report.total_preds += ie.preds;
    report.total_gts += ie.gts;
  }
  report.overall = prf(report.total_matches, report.total_preds, report.total_gts);
  return report;
}

}  // namespace ctr

#include "ctr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ctr/error.hpp"
#include "ctr/rng.hpp"

namespace ctr {

double rbf_kernel(const Features& x, const Features& y, double gamma) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = x[k] - y[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

struct LazyGram {
  const std::vector<Features>& x;
  double gamma;
  std::unordered_map<int, std::vector<double>> rows;

  const std::vector<double>& row(int i) {
    auto it = rows.find(i);
    if (it != rows.end()) return it->second;
    std::vector<double> r(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) r[j] = rbf_kernel(x[i], x[j], gamma);
    return rows.emplace(i, std::move(r)).first->second;
  }
};

}  // namespace

SvmModel train_smo(std::span<const Features> samples, std::span<const int> labels, double C,
                   double gamma, double tol, std::size_t max_iter) {
  const int n = int(samples.size());
  if (n < 2 || labels.size() != samples.size())
    raise(ErrorCode::SingleClassData, "need at least one sample of each class");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y > 0) has_pos = true;
    else has_neg = true;
  }
  if (!has_pos || !has_neg)
    raise(ErrorCode::SingleClassData, "training data contains a single class");

  SvmModel model;
  model.C = C;
  model.gamma = gamma;

  // standardize features (population statistics, degenerate scale -> 1)
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const Features& s : samples) mean += s[k];
    mean /= n;
    double var = 0.0;
    for (const Features& s : samples) var += (s[k] - mean) * (s[k] - mean);
    var /= n;
    model.feature_mean[k] = mean;
    model.feature_scale[k] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  std::vector<Features> x(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      x[i][k] = (samples[i][k] - model.feature_mean[k]) / model.feature_scale[k];

  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = labels[i] > 0 ? 1.0 : -1.0;

  LazyGram gram{x, gamma, {}};
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G_i = (Q alpha)_i - 1

  auto in_up = [&](int i) { return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0); };
  auto in_low = [&](int i) { return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C); };

  constexpr double kTau = 1e-12;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    int i = -1;
    double m_val = -std::numeric_limits<double>::max();
    for (int t = 0; t < n; ++t) {
      if (!in_up(t)) continue;
      const double v = -y[t] * grad[t];
      if (v > m_val) { m_val = v; i = t; }
    }
    double big_m = std::numeric_limits<double>::max();
    for (int t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      big_m = std::min(big_m, -y[t] * grad[t]);
    }
    if (i < 0 || m_val - big_m <= tol) break;

    const std::vector<double>& ki = gram.row(i);
    int j = -1;
    double best_obj = std::numeric_limits<double>::max();
    for (int t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double vt = -y[t] * grad[t];
      if (vt >= m_val) continue;
      const double b = m_val - vt;
      double a = ki[i] + gram.row(t)[t] - 2.0 * y[i] * y[t] * ki[t];
      if (a <= 0.0) a = kTau;
      const double obj = -(b * b) / a;
      if (obj < best_obj) { best_obj = obj; j = t; }
    }
    if (j < 0) break;

    const std::vector<double>& kj = gram.row(j);
    const double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = ki[i] + kj[j] + 2.0 * ki[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0 && alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      else if (diff <= 0.0 && alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      if (diff > 0.0 && alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      else if (diff <= 0.0 && alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
    } else {
      double quad = ki[i] + kj[j] - 2.0 * ki[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
        else if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
        else if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = (alpha[i] - old_ai) * y[i];
    const double daj = (alpha[j] - old_aj) * y[j];
    for (int t = 0; t < n; ++t)
      grad[t] += y[t] * (ki[t] * dai + kj[t] * daj);
  }

  // bias from the free support vectors (KKT interval midpoint otherwise)
  double b_sum = 0.0;
  int b_count = 0;
  for (int t = 0; t < n; ++t) {
    if (alpha[t] > kTau && alpha[t] < C - kTau) {
      b_sum += -y[t] * grad[t];
      ++b_count;
    }
  }
  if (b_count > 0) {
    model.bias = b_sum / b_count;
  } else {
    double up = -std::numeric_limits<double>::max();
    double low = std::numeric_limits<double>::max();
    for (int t = 0; t < n; ++t) {
      if (in_up(t)) up = std::max(up, -y[t] * grad[t]);
      if (in_low(t)) low = std::min(low, -y[t] * grad[t]);
    }
    model.bias = 0.5 * (up + low);
  }

  for (int t = 0; t < n; ++t) {
    if (alpha[t] <= kTau) continue;
    model.support_vectors.push_back(x[t]);
    model.coefficients.push_back(alpha[t] * y[t]);
  }
  return model;
}

std::pair<int, double> predict(const SvmModel& model, const Features& features) {
  if (model.support_vectors.size() != model.coefficients.size())
    raise(ErrorCode::ModelFeatureMismatch, "inconsistent support vector data");
  Features x;
  for (int k = 0; k < 3; ++k)
    x[k] = (features[k] - model.feature_mean[k]) / model.feature_scale[k];
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
    f += model.coefficients[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
  return {f >= 0.0 ? 1 : -1, f};
}

GridSearchResult grid_search_cv(std::span<const Features> samples, std::span<const int> labels,
                                std::span<const double> c_grid, std::span<const double> gamma_grid,
                                int folds, std::uint64_t seed) {
  const int n = int(samples.size());
  if (folds < 2) raise(ErrorCode::InsufficientData, "need at least 2 folds");
  std::vector<int> pos, neg;
  for (int i = 0; i < n; ++i) (labels[i] > 0 ? pos : neg).push_back(i);
  if (int(pos.size()) < folds || int(neg.size()) < folds)
    raise(ErrorCode::InsufficientData, "need at least k samples per class for k-fold CV");

  Rng rng(Rng::mix(seed, 0x5f01d));
  auto shuffle = [&rng](std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng.below(i)]);
  };
  shuffle(pos);
  shuffle(neg);

  std::vector<int> fold_of(n, 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = int(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = int(i % folds);

  GridSearchResult result;
  result.best_accuracy = -1.0;
  for (double C : c_grid) {
    for (double gamma : gamma_grid) {
      int correct = 0;
      for (int f = 0; f < folds; ++f) {
        std::vector<Features> train_x;
        std::vector<int> train_y, test_idx;
        for (int i = 0; i < n; ++i) {
          if (fold_of[i] == f) {
            test_idx.push_back(i);
          } else {
            train_x.push_back(samples[i]);
            train_y.push_back(labels[i]);
          }
        }
        const SvmModel model = train_smo(train_x, train_y, C, gamma);
        for (int i : test_idx)
          if (predict(model, samples[i]).first == (labels[i] > 0 ? 1 : -1)) ++correct;
      }
      const double acc = double(correct) / n;
      result.table.push_back({C, gamma, acc});
      const bool better = acc > result.best_accuracy ||
                          (acc == result.best_accuracy &&
                           (C < result.best_C || (C == result.best_C && gamma < result.best_gamma)));
      if (better) {
        result.best_accuracy = acc;
        result.best_C = C;
        result.best_gamma = gamma;
      }
    }
  }
  return result;
}

void append_filter_dataset(std::span<const LabeledDetection> detections,
                           std::span<const Polygon> ground_truth, FilterDataset& out,
                           double iou_thresh) {
  for (const LabeledDetection& det : detections) {
    double best = 0.0;
    for (const Polygon& gt : ground_truth)
      best = std::max(best, polygon_iou(det.boundary, gt));
    out.samples.push_back(det.features);
    out.labels.push_back(best >= iou_thresh ? 1 : -1);
  }
}

FilterDataset build_filter_dataset(std::span<const std::vector<LabeledDetection>> detections,
                                   std::span<const std::vector<Polygon>> ground_truth,
                                   double iou_thresh) {
  if (detections.size() != ground_truth.size())
    raise(ErrorCode::FormatError, "detections and ground truth must pair per image");
  FilterDataset out;
  for (std::size_t i = 0; i < detections.size(); ++i)
    append_filter_dataset(detections[i], ground_truth[i], out, iou_thresh);
  return out;
}

}  // namespace ctr

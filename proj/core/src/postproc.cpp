#include "ctr/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "ctr/error.hpp"
#include "ctr/labelgen.hpp"

namespace ctr {

std::vector<CandidatePixel> binarize(const GeoFeatureMap& map, double conf_thresh,
                                     double cls_thresh) {
  std::vector<CandidatePixel> out;
  const int w = map.width(), h = map.height();
  const float conf_gate = float(conf_thresh);  // compare at storage precision
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const float conf = map.at(Channel::Text, row, col);
      if (conf < conf_gate) continue;
      CandidatePixel c;
      c.row = row;
      c.col = col;
      c.confidence = conf;
      c.r_k = std::max(0.0, double(map.at(Channel::RadiusKernel, row, col)));
      c.r_e = std::max(0.0, double(map.at(Channel::RadiusEdge, row, col)));
      c.alpha = std::clamp(double(map.at(Channel::Alpha, row, col)), 0.0, std::numbers::pi / 2.0);
      const int q1 = map.at(Channel::Q1, row, col) >= cls_thresh ? 1 : 0;
      const int q2 = map.at(Channel::Q2, row, col) >= cls_thresh ? 1 : 0;
      c.theta = decode_angle(c.alpha, q1, q2);
      out.push_back(c);
    }
  }
  return out;
}

namespace {

std::pair<int, int> kernel_pixel(const CandidatePixel& c, int height) {
  const Vec2 p = GeoFeatureMap::pixel_center(c.row, c.col, height);
  const Vec2 pk = p + Vec2{std::cos(c.theta), std::sin(c.theta)} * c.r_k;
  return GeoFeatureMap::nearest_pixel(pk, height);
}

}  // namespace

std::vector<int> cluster(std::span<const CandidatePixel> candidates, int width, int height,
                         double kernel_scale, int connectivity) {
  std::vector<int> ids(candidates.size(), -1);
  if (candidates.empty()) return ids;

  std::vector<char> stamped(std::size_t(width) * height, 0);
  std::vector<std::pair<int, int>> kpix(candidates.size(), {-1, -1});
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto [kr, kc] = kernel_pixel(candidates[i], height);
    if (kr < 0 || kr >= height || kc < 0 || kc >= width) continue;  // dropped
    kpix[i] = {kr, kc};
    const double radius = kernel_disk_radius(candidates[i].r_k, candidates[i].r_e, kernel_scale);
    const int ir = int(radius);
    if (ir <= 0) {
      stamped[std::size_t(kr) * width + kc] = 1;
      continue;
    }
    for (int dr = -ir; dr <= ir; ++dr) {
      const int r = kr + dr;
      if (r < 0 || r >= height) continue;
      for (int dc = -ir; dc <= ir; ++dc) {
        const int c = kc + dc;
        if (c < 0 || c >= width) continue;
        if (double(dr) * dr + double(dc) * dc <= radius * radius)
          stamped[std::size_t(r) * width + c] = 1;
      }
    }
  }

  std::vector<int> label(std::size_t(width) * height, -1);
  int next = 0;
  std::deque<int> bfs;
  const bool diag = connectivity == 8;
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const std::size_t idx = std::size_t(row) * width + col;
      if (!stamped[idx] || label[idx] >= 0) continue;
      const int id = next++;
      label[idx] = id;
      bfs.push_back(int(idx));
      while (!bfs.empty()) {
        const int cur = bfs.front();
        bfs.pop_front();
        const int cr = cur / width, cc = cur % width;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (!diag && dr != 0 && dc != 0) continue;
            const int r = cr + dr, c = cc + dc;
            if (r < 0 || r >= height || c < 0 || c >= width) continue;
            const std::size_t n = std::size_t(r) * width + c;
            if (!stamped[n] || label[n] >= 0) continue;
            label[n] = id;
            bfs.push_back(int(n));
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto [kr, kc] = kpix[i];
    if (kr < 0) continue;
    ids[i] = label[std::size_t(kr) * width + kc];
  }
  return ids;
}

std::vector<DetectedInstance> reconstruct(std::span<const CandidatePixel> candidates,
                                          std::span<const int> cluster_ids, int width, int height) {
  std::vector<int> cluster_of(std::size_t(width) * height, -1);
  std::vector<int> source_of(std::size_t(width) * height, -1);

  auto stamp = [&](Vec2 p, int id, int src) {
    const auto [r, c] = GeoFeatureMap::nearest_pixel(p, height);
    if (r < 0 || r >= height || c < 0 || c >= width) return;
    const std::size_t idx = std::size_t(r) * width + c;
    cluster_of[idx] = id;
    source_of[idx] = src;
  };

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int id = cluster_ids[i];
    if (id < 0) continue;
    const CandidatePixel& c = candidates[i];
    const Vec2 p = GeoFeatureMap::pixel_center(c.row, c.col, height);
    const Vec2 dir{std::cos(c.theta), std::sin(c.theta)};
    const Vec2 pe = p - dir * c.r_e;
    const double len = 2.0 * (c.r_k + c.r_e);  // pe to the far edge through the kernel point
    // both endpoints sit on the instance boundary; sample half a pixel inside
    // so nearest-pixel rounding never smears past the edges
    const double t0 = std::min(0.5, 0.5 * len);
    const double t1 = std::max(len - 0.5, 0.5 * len);
    const int steps = std::max(1, int(std::ceil((t1 - t0) / 0.5)));
    for (int s = 0; s <= steps; ++s)
      stamp(pe + dir * (t0 + (t1 - t0) * double(s) / steps), id, int(i));
  }
  // candidate pixels always keep their own cluster id
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int id = cluster_ids[i];
    if (id < 0) continue;
    const std::size_t idx = std::size_t(candidates[i].row) * width + candidates[i].col;
    cluster_of[idx] = id;
    source_of[idx] = int(i);
  }

  std::unordered_map<int, std::size_t> slot;
  std::vector<DetectedInstance> out;
  for (std::size_t idx = 0; idx < cluster_of.size(); ++idx) {
    const int id = cluster_of[idx];
    if (id < 0) continue;
    auto it = slot.find(id);
    if (it == slot.end()) {
      it = slot.emplace(id, out.size()).first;
      out.emplace_back();
      out.back().cluster_id = id;
    }
    DetectedInstance& inst = out[it->second];
    inst.pixels.push_back(int(idx));
    inst.source_candidate.push_back(source_of[idx]);
  }
  for (std::size_t i = 0; i < cluster_ids.size(); ++i)
    if (cluster_ids[i] >= 0) ++out[slot[cluster_ids[i]]].candidate_count;
  std::sort(out.begin(), out.end(),
            [](const DetectedInstance& a, const DetectedInstance& b) {
              return a.cluster_id < b.cluster_id;
            });
  return out;
}

InstanceFeatures instance_features(const DetectedInstance& inst,
                                   std::span<const CandidatePixel> candidates) {
  if (inst.pixels.empty()) raise(ErrorCode::EmptyInstance, "instance mask is empty");
  const std::size_t n = inst.pixels.size();
  double conf_sum = 0.0, alpha_sum = 0.0, alpha_sq = 0.0;
  std::vector<double> heights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CandidatePixel& c = candidates[inst.source_candidate[i]];
    conf_sum += c.confidence;
    alpha_sum += c.alpha;
    alpha_sq += c.alpha * c.alpha;
    heights[i] = c.r_k + c.r_e;
  }
  InstanceFeatures f;
  f.mean_confidence = conf_sum / double(n);
  const double alpha_mean = alpha_sum / double(n);
  f.sigma_alpha = std::sqrt(std::max(0.0, alpha_sq / double(n) - alpha_mean * alpha_mean));

  // Half-height estimate: the plain mean is biased upward by the ray fans at
  // the kernel endpoints, so take the mean of the lowest quartile, which is
  // exactly h/2 on the regular ray family.
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  std::nth_element(heights.begin(), heights.begin() + long(q - 1), heights.end());
  double mu = 0.0;
  for (std::size_t i = 0; i < q; ++i) mu += heights[i];
  mu = std::max(mu / double(q), 0.25);
  f.aspect_ratio = double(n) / (4.0 * mu * mu);
  return f;
}

void filter_instances(std::vector<DetectedInstance>& instances, const SvmModel* model) {
  for (DetectedInstance& inst : instances) {
    if (!model) {
      inst.kept = true;
      inst.decision_value = 0.0;
      continue;
    }
    const auto [label, value] =
        predict(*model, {inst.mean_confidence, inst.sigma_alpha, inst.aspect_ratio});
    inst.kept = label > 0;
    inst.decision_value = value;
  }
}

DetectResult detect(const GeoFeatureMap& map, const PostprocConfig& config, const SvmModel* model) {
  DetectResult result;
  const int w = map.width(), h = map.height();
  const std::vector<CandidatePixel> candidates =
      binarize(map, config.conf_thresh, config.cls_thresh);
  std::vector<int> ids = cluster(candidates, w, h, config.kernel_scale, config.connectivity);

  if (config.collect_debug) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (ids[i] < 0) continue;
      const auto [kr, kc] = kernel_pixel(candidates[i], h);
      result.debug_stamps.push_back(
          {kr, kc, kernel_disk_radius(candidates[i].r_k, candidates[i].r_e, config.kernel_scale)});
    }
  }

  // clusters with too few supporting candidates are isolated-noise artifacts
  std::unordered_map<int, int> support;
  for (int id : ids)
    if (id >= 0) ++support[id];
  for (int& id : ids)
    if (id >= 0 && support[id] < config.min_candidates) id = -1;

  result.instances = reconstruct(candidates, ids, w, h);
  for (DetectedInstance& inst : result.instances) {
    const InstanceFeatures f = instance_features(inst, candidates);
    inst.mean_confidence = f.mean_confidence;
    inst.sigma_alpha = f.sigma_alpha;
    inst.aspect_ratio = f.aspect_ratio;
  }
  std::erase_if(result.instances, [&](DetectedInstance& inst) {
    try {
      inst.boundary = mask_to_polygon(inst.pixels, w, h, config.simplify_tol);
      return false;
    } catch (const Error&) {
      return true;  // un-traceable degenerate mask
    }
  });
  filter_instances(result.instances, model);
  return result;
}

}  // namespace ctr

#include "ctr/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "ctr/error.hpp"

namespace ctr {

namespace {
std::uint64_t dir_edge_key(int a, int b) {
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}
}  // namespace

TriangleLocator::TriangleLocator(std::span<const Vec2> vertices,
                                 std::span<const std::array<int, 3>> triangles)
    : verts_(vertices), tris_(triangles) {
  grid_min_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  grid_max_ = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec2& v : verts_) {
    grid_min_.x = std::min(grid_min_.x, v.x);
    grid_min_.y = std::min(grid_min_.y, v.y);
    grid_max_.x = std::max(grid_max_.x, v.x);
    grid_max_.y = std::max(grid_max_.y, v.y);
  }
  diameter_ = (grid_max_ - grid_min_).norm();
  tol_ = 1e-9 * std::max(diameter_, 1e-300);

  // adjacency from shared directed edges
  neighbors_.assign(tris_.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, std::pair<int, int>> half;  // directed edge -> (tri, side)
  half.reserve(tris_.size() * 3);
  for (int t = 0; t < int(tris_.size()); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = tris_[t][(i + 1) % 3];
      const int b = tris_[t][(i + 2) % 3];
      half[dir_edge_key(a, b)] = {t, i};
    }
  }
  for (int t = 0; t < int(tris_.size()); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = tris_[t][(i + 1) % 3];
      const int b = tris_[t][(i + 2) % 3];
      const auto it = half.find(dir_edge_key(b, a));
      if (it != half.end()) neighbors_[t][i] = it->second.first;
    }
  }

  const int target = std::max(1, int(std::sqrt(double(tris_.size()))));
  grid_nx_ = target;
  grid_ny_ = target;
  cell_w_ = std::max((grid_max_.x - grid_min_.x) / grid_nx_, 1e-300);
  cell_h_ = std::max((grid_max_.y - grid_min_.y) / grid_ny_, 1e-300);
  grid_seed_.assign(std::size_t(grid_nx_) * grid_ny_, -1);
  for (int t = 0; t < int(tris_.size()); ++t) {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (int i = 0; i < 3; ++i) {
      const Vec2 v = verts_[tris_[t][i]];
      lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
    const int cx0 = std::clamp(int((lo.x - grid_min_.x) / cell_w_), 0, grid_nx_ - 1);
    const int cx1 = std::clamp(int((hi.x - grid_min_.x) / cell_w_), 0, grid_nx_ - 1);
    const int cy0 = std::clamp(int((lo.y - grid_min_.y) / cell_h_), 0, grid_ny_ - 1);
    const int cy1 = std::clamp(int((hi.y - grid_min_.y) / cell_h_), 0, grid_ny_ - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        grid_seed_[std::size_t(cy) * grid_nx_ + cx] = t;
  }
}

std::array<double, 3> TriangleLocator::barycentric(int tri, Vec2 p) const {
  const Vec2 a = verts_[tris_[tri][0]];
  const Vec2 b = verts_[tris_[tri][1]];
  const Vec2 c = verts_[tris_[tri][2]];
  const double o0 = orient2d(b, c, p);
  const double o1 = orient2d(c, a, p);
  const double o2 = orient2d(a, b, p);
  const double sum = o0 + o1 + o2;
  if (sum == 0.0) return {-1.0, -1.0, -1.0};
  return {o0 / sum, o1 / sum, o2 / sum};
}

std::optional<BaryHit> TriangleLocator::walk_from(int tri, Vec2 p) const {
  int t = tri;
  int prev = -1;
  const int max_steps = int(tris_.size()) + 64;
  for (int step = 0; step < max_steps && t >= 0; ++step) {
    const Vec2 a = verts_[tris_[t][0]];
    const Vec2 b = verts_[tris_[t][1]];
    const Vec2 c = verts_[tris_[t][2]];
    const double o[3] = {orient2d(b, c, p), orient2d(c, a, p), orient2d(a, b, p)};
    const double len[3] = {(c - b).norm(), (a - c).norm(), (b - a).norm()};
    int worst = -1;
    double worst_d = -tol_;
    int step_to = -1;
    double step_d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = o[i] / std::max(len[i], 1e-300);  // signed distance to edge i
      if (d < worst_d) { worst_d = d; worst = i; }
      if (d < -tol_ && neighbors_[t][i] >= 0 && neighbors_[t][i] != prev &&
          (step_to < 0 || d < step_d)) {
        step_to = neighbors_[t][i];
        step_d = d;
      }
    }
    if (worst < 0) {
      const auto bc = barycentric(t, p);
      if (bc[0] >= -1.0) return BaryHit{t, bc};
      return std::nullopt;
    }
    if (step_to < 0) return std::nullopt;  // blocked at boundary; caller rescans
    prev = t;
    t = step_to;
  }
  return std::nullopt;
}

std::optional<BaryHit> TriangleLocator::scan_all(Vec2 p) const {
  int best = -1;
  double best_d = -std::numeric_limits<double>::max();
  for (int t = 0; t < int(tris_.size()); ++t) {
    const Vec2 a = verts_[tris_[t][0]];
    const Vec2 b = verts_[tris_[t][1]];
    const Vec2 c = verts_[tris_[t][2]];
    const double o[3] = {orient2d(b, c, p), orient2d(c, a, p), orient2d(a, b, p)};
    const double len[3] = {(c - b).norm(), (a - c).norm(), (b - a).norm()};
    double mind = std::numeric_limits<double>::max();
    for (int i = 0; i < 3; ++i) mind = std::min(mind, o[i] / std::max(len[i], 1e-300));
    if (mind > best_d) { best_d = mind; best = t; }
    if (mind >= 0.0) break;  // strictly contained; no better answer exists
  }
  if (best < 0 || best_d < -tol_) return std::nullopt;
  const auto bc = barycentric(best, p);
  if (bc[0] < -1.0) return std::nullopt;
  return BaryHit{best, bc};
}

std::optional<BaryHit> TriangleLocator::try_locate(Vec2 p) const {
  if (tris_.empty()) return std::nullopt;
  const int cx = std::clamp(int((p.x - grid_min_.x) / cell_w_), 0, grid_nx_ - 1);
  const int cy = std::clamp(int((p.y - grid_min_.y) / cell_h_), 0, grid_ny_ - 1);
  int seed = grid_seed_[std::size_t(cy) * grid_nx_ + cx];
  if (seed < 0) seed = 0;
  if (auto hit = walk_from(seed, p)) return hit;
  return scan_all(p);
}

BaryHit TriangleLocator::locate(Vec2 p) const {
  if (auto hit = try_locate(p)) return *hit;
  raise(ErrorCode::PointOutsideMesh, "point is not covered by the mesh");
}

}  // namespace ctr

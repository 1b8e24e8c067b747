#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ctr/error.hpp"
#include "ctr/postproc.hpp"

namespace ctr {
namespace {

struct Bitmap {
  int r0 = 0, c0 = 0, rows = 0, cols = 0;
  std::vector<char> fg;
  bool get(int r, int c) const {
    if (r < 0 || r >= rows || c < 0 || c >= cols) return false;
    return fg[std::size_t(r) * cols + c] != 0;
  }
  void set(int r, int c) { fg[std::size_t(r) * cols + c] = 1; }
};

// Patch diagonal-only adjacencies so the crack boundary is a simple cycle.
void four_connectify(Bitmap& bm) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r + 1 < bm.rows; ++r) {
      for (int c = 0; c < bm.cols; ++c) {
        if (!bm.get(r, c)) continue;
        if (c + 1 < bm.cols && bm.get(r + 1, c + 1) && !bm.get(r, c + 1) && !bm.get(r + 1, c)) {
          bm.set(r, c + 1);
          changed = true;
        }
        if (c - 1 >= 0 && bm.get(r + 1, c - 1) && !bm.get(r, c - 1) && !bm.get(r + 1, c)) {
          bm.set(r, c - 1);
          changed = true;
        }
      }
    }
  }
}

// Crack-following along pixel-lattice edges, foreground kept on the right.
// Lattice point (x, y) sits between pixels (y-1, x-1), (y-1, x), (y, x-1), (y, x).
std::vector<std::pair<int, int>> trace_outer(const Bitmap& bm) {
  int sr = -1, sc = -1;
  for (int r = 0; r < bm.rows && sr < 0; ++r)
    for (int c = 0; c < bm.cols; ++c)
      if (bm.get(r, c)) { sr = r; sc = c; break; }
  if (sr < 0) raise(ErrorCode::EmptyInstance, "empty mask");

  enum Dir { E = 0, S = 1, W = 2, N = 3 };
  const int dx[4] = {1, 0, -1, 0};
  const int dy[4] = {0, 1, 0, -1};
  // pixel on the right / left of an edge leaving (x, y) with heading d
  auto right_pixel = [](int x, int y, int d) -> std::pair<int, int> {
    switch (d) {
      case E: return {y, x};
      case S: return {y, x - 1};
      case W: return {y - 1, x - 1};
      default: return {y - 1, x};
    }
  };
  auto left_pixel = [](int x, int y, int d) -> std::pair<int, int> {
    switch (d) {
      case E: return {y - 1, x};
      case S: return {y, x};
      case W: return {y, x - 1};
      default: return {y - 1, x - 1};
    }
  };
  auto valid = [&](int x, int y, int d) {
    const auto [rr, rc] = right_pixel(x, y, d);
    const auto [lr, lc] = left_pixel(x, y, d);
    return bm.get(rr, rc) && !bm.get(lr, lc);
  };

  std::vector<std::pair<int, int>> loop;
  int x = sc, y = sr, d = E;
  const int start_x = x, start_y = y, start_d = d;
  const std::size_t cap = std::size_t(bm.rows + 2) * (bm.cols + 2) * 4 + 16;
  for (std::size_t guard = 0; guard < cap; ++guard) {
    loop.push_back({x, y});
    x += dx[d];
    y += dy[d];
    // hug the region: prefer right turn, then straight, then left, then back
    int nd = -1;
    for (int turn = 1; turn >= -2; --turn) {
      const int cand = (d + 4 - turn) % 4;  // turn=1 right, 0 straight, -1 left, -2 back
      if (valid(x, y, cand)) { nd = cand; break; }
    }
    if (nd < 0) raise(ErrorCode::EmptyInstance, "contour trace dead end");
    d = nd;
    if (x == start_x && y == start_y && d == start_d) return loop;
  }
  raise(ErrorCode::EmptyInstance, "contour trace did not close");
}

double point_line_dist(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len <= 0.0) return (p - a).norm();
  return std::abs(cross(ab, p - a)) / len;
}

void douglas_peucker(const std::vector<Vec2>& pts, std::size_t i, std::size_t j, double tol,
                     std::vector<char>& keep) {
  if (j <= i + 1) return;
  double worst = -1.0;
  std::size_t at = i;
  for (std::size_t k = i + 1; k < j; ++k) {
    const double d = point_line_dist(pts[k], pts[i], pts[j]);
    if (d > worst) { worst = d; at = k; }
  }
  if (worst > tol) {
    keep[at] = 1;
    douglas_peucker(pts, i, at, tol, keep);
    douglas_peucker(pts, at, j, tol, keep);
  }
}

bool simple_enough(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

Polygon finish_polygon(std::vector<Vec2> pts) {
  if (signed_area_of(pts) > 0.0) {
    std::reverse(pts.begin() + 1, pts.end());
  }
  Polygon poly;
  poly.vertices = std::move(pts);
  const std::size_t n = poly.vertices.size();
  poly.corners = {0, n / 4, n / 2, (3 * n) / 4};
  return poly;
}

}  // namespace

Polygon mask_to_polygon(std::span<const int> pixels, int width, int height, double simplify_tol) {
  if (pixels.empty()) raise(ErrorCode::EmptyInstance, "empty mask");

  int rmin = height, rmax = -1, cmin = width, cmax = -1;
  for (int idx : pixels) {
    const int r = idx / width, c = idx % width;
    rmin = std::min(rmin, r); rmax = std::max(rmax, r);
    cmin = std::min(cmin, c); cmax = std::max(cmax, c);
  }
  Bitmap bm;
  bm.r0 = rmin; bm.c0 = cmin;
  bm.rows = rmax - rmin + 1;
  bm.cols = cmax - cmin + 1;
  bm.fg.assign(std::size_t(bm.rows) * bm.cols, 0);
  for (int idx : pixels) bm.set(idx / width - rmin, idx % width - cmin);
  four_connectify(bm);

  const auto lattice = trace_outer(bm);
  std::vector<Vec2> loop;
  loop.reserve(lattice.size());
  for (const auto& [x, y] : lattice)
    loop.push_back({double(x + bm.c0), double(height - (y + bm.r0))});

  // collapse collinear runs of the rectilinear loop
  std::vector<Vec2> compact;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 prev = loop[(i + m - 1) % m];
    const Vec2 next = loop[(i + 1) % m];
    if (orient2d(prev, loop[i], next) != 0.0) compact.push_back(loop[i]);
  }
  if (compact.size() < 4) compact = loop;

  // simplify between four diagonal-extreme anchors
  const std::size_t n = compact.size();
  auto extreme = [&](auto key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (key(compact[i]) < key(compact[best])) best = i;
    return best;
  };
  std::vector<std::size_t> anchors{
      extreme([](Vec2 v) { return v.x + v.y; }), extreme([](Vec2 v) { return -v.x - v.y; }),
      extreme([](Vec2 v) { return v.x - v.y; }), extreme([](Vec2 v) { return v.y - v.x; })};
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  std::vector<char> keep(n, 0);
  for (std::size_t a : anchors) keep[a] = 1;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const std::size_t i = anchors[k];
    const std::size_t j = anchors[(k + 1) % anchors.size()];
    // unroll the cyclic chain i..j into a linear buffer
    std::vector<Vec2> chain;
    std::vector<std::size_t> chain_idx;
    for (std::size_t cur = i;; cur = (cur + 1) % n) {
      chain.push_back(compact[cur]);
      chain_idx.push_back(cur);
      if (cur == j && chain.size() > 1) break;
      if (chain.size() > n + 1) break;
    }
    std::vector<char> ck(chain.size(), 0);
    douglas_peucker(chain, 0, chain.size() - 1, simplify_tol, ck);
    for (std::size_t t = 1; t + 1 < chain.size(); ++t)
      if (ck[t]) keep[chain_idx[t]] = 1;
  }

  std::vector<Vec2> simplified;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) simplified.push_back(compact[i]);

  if (simplified.size() < 4 || !simple_enough(simplified))
    return finish_polygon(compact);
  return finish_polygon(simplified);
}

}  // namespace ctr

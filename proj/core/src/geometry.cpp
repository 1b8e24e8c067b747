#include "ctr/geometry.hpp"

#include <algorithm>
#include <limits>

#include "ctr/error.hpp"
#include "ctr/trimesh.hpp"

namespace ctr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::NonSimplePolygon: return "NonSimplePolygon";
    case ErrorCode::BadCorners: return "BadCorners";
    case ErrorCode::RefinementFailure: return "RefinementFailure";
    case ErrorCode::PointOutsideMesh: return "PointOutsideMesh";
    case ErrorCode::DegenerateSide: return "DegenerateSide";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::NonBijectiveMap: return "NonBijectiveMap";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::ModelFeatureMismatch: return "ModelFeatureMismatch";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::SelfIntersectingParams: return "SelfIntersectingParams";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

double signed_area_of(std::span<const Vec2> pts) {
  double s = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

double Polygon::signed_area() const { return signed_area_of(vertices); }
double Polygon::area() const { return std::abs(signed_area()); }

Vec2 Polygon::bbox_min() const {
  Vec2 m{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  for (const Vec2& v : vertices) { m.x = std::min(m.x, v.x); m.y = std::min(m.y, v.y); }
  return m;
}

Vec2 Polygon::bbox_max() const {
  Vec2 m{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec2& v : vertices) { m.x = std::max(m.x, v.x); m.y = std::max(m.y, v.y); }
  return m;
}

double Polygon::diameter() const { return (bbox_max() - bbox_min()).norm(); }

namespace {

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  if (orient2d(a, b, p) != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = orient2d(c, d, a);
  const double d2 = orient2d(c, d, b);
  const double d3 = orient2d(a, b, c);
  const double d4 = orient2d(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

namespace {

// Non-adjacent edge pairs must be disjoint; adjacent edges may only share
// their common endpoint (a fold-back spike counts as self-intersection).
bool is_simple_loop(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 c = pts[j];
      const Vec2 d = pts[(j + 1) % n];
      if (j == (i + 1) % n) {
        // edges (a,b) and (b,d) share b
        if (on_segment(c, d, a) || on_segment(a, b, d)) return false;
      } else if ((j + 1) % n == i) {
        // edges (a,b) and (c,a) share a
        if (on_segment(a, b, c) || on_segment(c, d, b)) return false;
      } else if (segments_intersect(a, b, c, d)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Polygon validate_polygon(std::span<const Vec2> points, std::array<std::size_t, 4> corners) {
  if (points.size() < 4) raise(ErrorCode::TooFewVertices, "polygon needs at least 4 vertices");
  for (std::size_t c : corners)
    if (c >= points.size()) raise(ErrorCode::BadCorners, "corner index out of range");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (corners[i] == corners[j]) raise(ErrorCode::BadCorners, "corner indices not distinct");

  // Merge exactly coincident consecutive vertices, remapping corner indices.
  std::vector<Vec2> pts;
  std::vector<std::size_t> remap(points.size());
  pts.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!pts.empty() && pts.back() == points[i]) {
      remap[i] = pts.size() - 1;
      continue;
    }
    remap[i] = pts.size();
    pts.push_back(points[i]);
  }
  if (pts.size() > 1 && pts.front() == pts.back()) {
    pts.pop_back();
    for (auto& r : remap)
      if (r == pts.size()) r = 0;
  }
  if (pts.size() < 4) raise(ErrorCode::TooFewVertices, "fewer than 4 vertices after merging duplicates");

  std::array<std::size_t, 4> cpos{};
  for (int i = 0; i < 4; ++i) cpos[i] = remap[corners[i]];
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (cpos[i] == cpos[j]) raise(ErrorCode::BadCorners, "corners coincide after duplicate merge");

  if (!is_simple_loop(pts)) raise(ErrorCode::NonSimplePolygon, "boundary self-intersects");
  const double sa = signed_area_of(pts);
  if (sa == 0.0) raise(ErrorCode::NonSimplePolygon, "degenerate zero-area boundary");

  const std::size_t n = pts.size();
  auto fwd_dist = [n](std::size_t from, std::size_t to) { return (to + n - from) % n; };
  const std::size_t d2 = fwd_dist(cpos[0], cpos[1]);
  const std::size_t d3 = fwd_dist(cpos[0], cpos[2]);
  const std::size_t d4 = fwd_dist(cpos[0], cpos[3]);
  const bool forward_order = d2 < d3 && d3 < d4;
  const bool reverse_order = d4 < d3 && d3 < d2;
  if (!forward_order && !reverse_order)
    raise(ErrorCode::BadCorners, "corners are not in cyclic order along the boundary");

  // Stored winding is negative-shoelace; reverse opposite-wound input.
  Polygon out;
  out.vertices.resize(n);
  std::array<std::size_t, 4> raw{};
  if (sa < 0.0) {
    for (std::size_t i = 0; i < n; ++i) out.vertices[i] = pts[(cpos[0] + i) % n];
    for (int c = 0; c < 4; ++c) raw[c] = fwd_dist(cpos[0], cpos[c]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.vertices[i] = pts[(cpos[0] + n - i) % n];
    for (int c = 0; c < 4; ++c) raw[c] = (n - fwd_dist(cpos[0], cpos[c])) % n;
  }

  // Corner labels follow encounter order along the stored winding. If the
  // annotation was wound the other way this relabels through the mirror
  // reading, which keeps the rectification orientation-preserving.
  std::array<std::size_t, 4> sorted = raw;
  std::sort(sorted.begin() + 1, sorted.end());
  out.corners = sorted;
  return out;
}

bool point_in_polygon(const Polygon& poly, Vec2 p) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(v[i], v[(i + 1) % n], p)) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double xc = v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Sutherland-Hodgman clip of a convex subject against one half-plane.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& subject, Vec2 a, Vec2 b) {
  std::vector<Vec2> out;
  const std::size_t n = subject.size();
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = subject[i];
    const Vec2 nxt = subject[(i + 1) % n];
    const double dc = orient2d(a, b, cur);
    const double dn = orient2d(a, b, nxt);
    if (dc >= 0) out.push_back(cur);
    if ((dc > 0 && dn < 0) || (dc < 0 && dn > 0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

double tri_tri_intersection_area(const std::array<Vec2, 3>& s, const std::array<Vec2, 3>& c) {
  std::vector<Vec2> poly(s.begin(), s.end());
  for (int i = 0; i < 3 && !poly.empty(); ++i)
    poly = clip_halfplane(poly, c[i], c[(i + 1) % 3]);
  if (poly.size() < 3) return 0.0;
  return std::abs(signed_area_of(poly));
}

struct TriSoup {
  std::vector<std::array<Vec2, 3>> tris;
  std::vector<std::array<Vec2, 2>> bbox;  // min, max per triangle
};

TriSoup triangulate_for_clipping(const Polygon& p) {
  const TriMesh mesh = triangulate(p, std::numeric_limits<double>::infinity());
  TriSoup soup;
  soup.tris.reserve(mesh.triangles.size());
  soup.bbox.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    std::array<Vec2, 3> tri{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    Vec2 lo{std::min({tri[0].x, tri[1].x, tri[2].x}), std::min({tri[0].y, tri[1].y, tri[2].y})};
    Vec2 hi{std::max({tri[0].x, tri[1].x, tri[2].x}), std::max({tri[0].y, tri[1].y, tri[2].y})};
    soup.tris.push_back(tri);
    soup.bbox.push_back({lo, hi});
  }
  return soup;
}

}  // namespace

double polygon_iou(const Polygon& a, const Polygon& b) {
  const Vec2 alo = a.bbox_min(), ahi = a.bbox_max();
  const Vec2 blo = b.bbox_min(), bhi = b.bbox_max();
  const double area_a = a.area();
  const double area_b = b.area();
  if (alo.x > bhi.x || blo.x > ahi.x || alo.y > bhi.y || blo.y > ahi.y)
    return 0.0;

  const TriSoup sa = triangulate_for_clipping(a);
  const TriSoup sb = triangulate_for_clipping(b);
  double inter = 0.0;
  for (std::size_t i = 0; i < sa.tris.size(); ++i) {
    for (std::size_t j = 0; j < sb.tris.size(); ++j) {
      const auto& ba = sa.bbox[i];
      const auto& bb = sb.bbox[j];
      if (ba[0].x > bb[1].x || bb[0].x > ba[1].x || ba[0].y > bb[1].y || bb[0].y > ba[1].y)
        continue;
      inter += tri_tri_intersection_area(sa.tris[i], sb.tris[j]);
    }
  }
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Polygon transform_polygon(const Polygon& poly, double angle, Vec2 translate) {
  Polygon out = poly;
  const double c = std::cos(angle), s = std::sin(angle);
  for (Vec2& v : out.vertices)
    v = Vec2{c * v.x - s * v.y, s * v.x + c * v.y} + translate;
  return out;
}

}  // namespace ctr

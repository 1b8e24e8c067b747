#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ctr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Twice the signed area of triangle (a, b, c); positive when counterclockwise.
inline double orient2d(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

/// A text-instance boundary in the internal y-up frame.
///
/// Stored convention: the vertex loop traverses the boundary so that the four
/// annotated corners appear in increasing index order with corners[0] == 0,
/// i.e. the traversal c1 -> c2 -> c3 -> c4 winds the same way as the target
/// rectangle loop (0,h) -> (w,h) -> (w,0) -> (0,0). In the y-up frame this is
/// a negative-shoelace (clockwise) loop; the matching winding is what makes
/// the rectification orientation-preserving.
struct Polygon {
  std::vector<Vec2> vertices;            // no repeated closing vertex
  std::array<std::size_t, 4> corners{};  // strictly increasing, corners[0] == 0

  std::size_t size() const { return vertices.size(); }
  double area() const;       // enclosed area, positive
  double signed_area() const;
  Vec2 bbox_min() const;
  Vec2 bbox_max() const;
  double diameter() const;   // bounding-box diagonal
};

/// Normalizes an annotated boundary into the stored Polygon convention.
/// Merges exactly coincident consecutive vertices, rejects self-intersecting
/// boundaries, reverses opposite-wound input and rotates the loop so that the
/// first corner sits at index 0.
Polygon validate_polygon(std::span<const Vec2> points, std::array<std::size_t, 4> corners);

/// True when p lies inside the polygon or on its boundary.
bool point_in_polygon(const Polygon& poly, Vec2 p);

/// Exact-clipping intersection-over-union of two simple polygons.
double polygon_iou(const Polygon& a, const Polygon& b);

double signed_area_of(std::span<const Vec2> pts);

/// Rigid motion: rotate about the origin by angle, then translate.
Polygon transform_polygon(const Polygon& poly, double angle, Vec2 translate);

/// True when segments [a,b] and [c,d] share at least one point.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace ctr

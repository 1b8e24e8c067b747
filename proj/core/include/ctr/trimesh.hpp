#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ctr/geometry.hpp"

namespace ctr {

/// Refined constrained Delaunay triangulation of a Polygon.
///
/// Triangles are stored counterclockwise (positive signed area). The boundary
/// loop lists vertex indices in the polygon's stored winding, starting at the
/// first corner; corner_pos gives the positions of the four corners within it.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_loop;       // open loop, boundary_loop[0] is corner c1
  std::array<int, 4> corner_pos{};      // positions within boundary_loop, corner_pos[0] == 0

  double total_area() const;
  double diameter() const;
  double triangle_area(int t) const;
};

/// Constrained Delaunay triangulation refined until every triangle area is at
/// most max_area. Throws RefinementFailure when the vertex budget is exceeded.
TriMesh triangulate(const Polygon& poly, double max_area, std::size_t max_vertices = 200000);

struct BaryHit {
  int tri = -1;
  std::array<double, 3> bary{};
};

/// Point location over a fixed triangle soup: straight walk seeded from a
/// uniform grid, with a brute-force fallback for walks that exit the domain.
/// The located barycentric coordinates reproduce the query point exactly
/// (they are computed from the containing triangle).
class TriangleLocator {
public:
  TriangleLocator(std::span<const Vec2> vertices, std::span<const std::array<int, 3>> triangles);

  std::optional<BaryHit> try_locate(Vec2 p) const;
  BaryHit locate(Vec2 p) const;  // throws PointOutsideMesh

  double diameter() const { return diameter_; }

private:
  std::optional<BaryHit> walk_from(int tri, Vec2 p) const;
  std::optional<BaryHit> scan_all(Vec2 p) const;
  std::array<double, 3> barycentric(int tri, Vec2 p) const;

  std::span<const Vec2> verts_;
  std::span<const std::array<int, 3>> tris_;
  std::vector<std::array<int, 3>> neighbors_;  // across edge opposite each triangle vertex
  std::vector<int> grid_seed_;
  int grid_nx_ = 0, grid_ny_ = 0;
  Vec2 grid_min_{}, grid_max_{};
  double cell_w_ = 1.0, cell_h_ = 1.0;
  double diameter_ = 0.0;
  double tol_ = 1e-12;
};

}  // namespace ctr

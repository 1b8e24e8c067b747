#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ctr/geometry.hpp"
#include "ctr/trimesh.hpp"

namespace ctr {

/// Dirichlet data: one target position on the rectangle boundary per
/// boundary-loop vertex, corners pinned to (0,h), (w,h), (w,0), (0,0).
struct BoundaryParam {
  std::vector<Vec2> targets;  // indexed like TriMesh::boundary_loop
  double width = 1.0;
  double height = 1.0;
};

/// Corners pinned in loop order, intermediate vertices placed along each
/// rectangle side by accumulated-chord-length proportion.
BoundaryParam boundary_map(const TriMesh& mesh, double width, double height);

struct BijectivityReport {
  int flipped_triangles = 0;
  double min_signed_area = 0.0;
  bool bijective() const { return flipped_triangles == 0; }
};

/// Piecewise-linear harmonic map from a meshed polygon onto a rectangle.
/// Forward evaluation interpolates vertex images over the source mesh;
/// inverse evaluation interpolates source positions over the image mesh and
/// is refused when the bijectivity audit found flipped triangles.
class HarmonicMap {
public:
  HarmonicMap(TriMesh mesh, std::vector<Vec2> image, double width, double height);
  HarmonicMap(HarmonicMap&&) noexcept = default;
  HarmonicMap& operator=(HarmonicMap&&) noexcept = default;
  HarmonicMap(const HarmonicMap&) = delete;
  HarmonicMap& operator=(const HarmonicMap&) = delete;

  const TriMesh& mesh() const { return mesh_; }
  const std::vector<Vec2>& image() const { return image_; }
  double width() const { return width_; }
  double height() const { return height_; }
  const BijectivityReport& audit() const { return audit_; }

  Vec2 forward(Vec2 p) const;
  Vec2 inverse(Vec2 q) const;

private:
  TriMesh mesh_;
  std::vector<Vec2> image_;
  double width_ = 1.0, height_ = 1.0;
  BijectivityReport audit_;
  std::unique_ptr<TriangleLocator> source_locator_;
  std::unique_ptr<TriangleLocator> image_locator_;  // null when the map is not bijective
};

/// Linear FEM solution of the Laplace equation with Dirichlet data bc.
/// Direct sparse factorization with a conjugate-gradient fallback; relative
/// residual above 1e-10 on both paths raises SolverDivergence.
HarmonicMap solve_harmonic(TriMesh mesh, const BoundaryParam& bc);

Vec2 forward(const HarmonicMap& map, Vec2 p);
Vec2 inverse(const HarmonicMap& map, Vec2 q);
BijectivityReport check_bijective(const HarmonicMap& map);

/// Mean horizontal / vertical fiber lengths of the mapped region, computed by
/// exact per-triangle quadrature of the inverse-map Jacobian columns.
/// Requires a bijective map solved for the unit square.
std::pair<double, double> ctr_dims(const HarmonicMap& map);

struct CtrConfig {
  double max_area_fraction = 1.0 / 2000.0;  // max triangle area as a fraction of |S|
  bool normalized_area_mode = false;        // reproduce the 1e-5 unit-area rule instead
  std::size_t max_vertices = 200000;
};

/// A polygon's canonical rectangle together with the bijection onto it.
/// The map is solved once for the unit square; the rectangle of size
/// (width, height) is realized by coordinatewise rescaling.
class Ctr {
public:
  Ctr(HarmonicMap unit_map, double width, double height)
      : map_(std::move(unit_map)), width_(width), height_(height) {}

  double width() const { return width_; }
  double height() const { return height_; }
  const HarmonicMap& unit_map() const { return map_; }

  Vec2 forward(Vec2 p) const {
    const Vec2 u = map_.forward(p);
    return {u.x * width_, u.y * height_};
  }
  Vec2 inverse(Vec2 q) const { return map_.inverse({q.x / width_, q.y / height_}); }

private:
  HarmonicMap map_;
  double width_ = 1.0, height_ = 1.0;
};

Ctr build_ctr(const Polygon& poly, const CtrConfig& config = {});

}  // namespace ctr

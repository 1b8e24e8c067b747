#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctr/error.hpp"
#include "ctr/harmonic.hpp"
#include "ctr/rng.hpp"
#include "ctr/synth.hpp"
#include "ctr/trimesh.hpp"

using namespace ctr;

namespace {

Polygon rect_poly(double w, double h) {
  const std::vector<Vec2> pts{{0, h}, {w, h}, {w, 0}, {0, 0}};
  return validate_polygon(pts, {0, 1, 2, 3});
}

// Independent check of the fiber-length integrals: dense central-difference
// quadrature over the unit square using only inverse-map evaluations.
std::pair<double, double> grid_quadrature_dims(const HarmonicMap& map, int res) {
  const double cell = 1.0 / res;
  const double delta = cell / 4.0;
  double wc = 0.0, hc = 0.0;
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix) {
      const double x = (ix + 0.5) * cell;
      const double y = (iy + 0.5) * cell;
      const Vec2 dx = (map.inverse({x + delta, y}) - map.inverse({x - delta, y})) / (2 * delta);
      const Vec2 dy = (map.inverse({x, y + delta}) - map.inverse({x, y - delta})) / (2 * delta);
      wc += dx.norm() * cell * cell;
      hc += dy.norm() * cell * cell;
    }
  }
  return {wc, hc};
}

void check_maximum_principle(const HarmonicMap& map) {
  const double eps = 1e-9 * std::max(map.width(), map.height());
  for (const Vec2& q : map.image()) {
    CHECK(q.x >= -eps);
    CHECK(q.x <= map.width() + eps);
    CHECK(q.y >= -eps);
    CHECK(q.y <= map.height() + eps);
  }
}

}  // namespace

TEST_CASE("boundary_map pins the corners and spreads sides by chord length") {
  const Polygon sq = rect_poly(2, 2);
  const TriMesh mesh = triangulate(sq, 10.0);  // no refinement splits expected on tiny mesh
  const BoundaryParam bp = boundary_map(mesh, 1.0, 1.0);
  REQUIRE(bp.targets.size() == mesh.boundary_loop.size());
  CHECK(bp.targets[mesh.corner_pos[0]] == Vec2{0, 1});
  CHECK(bp.targets[mesh.corner_pos[1]] == Vec2{1, 1});
  CHECK(bp.targets[mesh.corner_pos[2]] == Vec2{1, 0});
  CHECK(bp.targets[mesh.corner_pos[3]] == Vec2{0, 0});
}

TEST_CASE("boundary_map places side vertices proportionally") {
  // top side has a vertex at 1/3 of the chord length
  const std::vector<Vec2> pts{{0, 1}, {1, 1}, {3, 1}, {3, 0}, {0, 0}};
  const Polygon poly = validate_polygon(pts, {0, 2, 3, 4});
  const TriMesh mesh = triangulate(poly, 100.0);
  const BoundaryParam bp = boundary_map(mesh, 1.0, 1.0);
  // find the loop vertex at (1, 1)
  int found = -1;
  for (std::size_t i = 0; i < mesh.boundary_loop.size(); ++i)
    if (mesh.vertices[mesh.boundary_loop[i]] == Vec2{1, 1}) found = int(i);
  REQUIRE(found >= 0);
  CHECK(bp.targets[found].x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(bp.targets[found].y == doctest::Approx(1.0));
}

TEST_CASE("boundary_map rejects a zero-length side") {
  TriMesh mesh;
  mesh.vertices = {{0, 0}, {0, 0}, {1, 0}, {1, 1}};  // duplicated corner point
  mesh.triangles = {{0, 2, 3}};
  mesh.boundary_loop = {0, 1, 2, 3};
  mesh.corner_pos = {0, 1, 2, 3};
  CHECK_THROWS_AS(boundary_map(mesh, 1.0, 1.0), Error);
  try {
    boundary_map(mesh, 1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSide);
  }
}

TEST_CASE("solve_harmonic reproduces identity boundary data") {
  const TriMesh mesh = triangulate(rect_poly(1, 1), 0.02);
  BoundaryParam bp;
  bp.width = 1.0;
  bp.height = 1.0;
  bp.targets.reserve(mesh.boundary_loop.size());
  for (int v : mesh.boundary_loop) bp.targets.push_back(mesh.vertices[v]);
  const HarmonicMap map = solve_harmonic(mesh, bp);
  for (std::size_t v = 0; v < map.mesh().vertices.size(); ++v)
    CHECK((map.image()[v] - map.mesh().vertices[v]).norm() <= 1e-9);
}

TEST_CASE("solve_harmonic finds the affine map for a rectangle") {
  const TriMesh mesh = triangulate(rect_poly(4, 1), 0.05);
  const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
  for (std::size_t v = 0; v < map.mesh().vertices.size(); ++v) {
    const Vec2 p = map.mesh().vertices[v];
    CHECK((map.image()[v] - Vec2{p.x / 4.0, p.y}).norm() <= 1e-9);
  }
  CHECK(map.audit().flipped_triangles == 0);

  SUBCASE("forward and inverse hit the worked example") {
    const Vec2 q = map.forward({2.0, 0.5});
    CHECK(q.x == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(q.y == doctest::Approx(0.5).epsilon(1e-9));
    const Vec2 p = map.inverse({0.5, 0.5});
    CHECK(p.x == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(0.5).epsilon(1e-9));
    // rectangle corner (0,0) pulls back to the source corner c4 = (0,0)
    const Vec2 c4 = map.inverse({0.0, 0.0});
    CHECK(c4.norm() <= 1e-9);
  }
}

TEST_CASE("interior images respect the discrete maximum principle on bent ribbons") {
  for (int i = 0; i < 10; ++i) {
    RibbonParams rp;
    rp.height = 10.0 + 3.0 * i;
    rp.width = rp.height * (2.0 + i);
    rp.curvature = 0.3 * i;
    rp.seed = 100 + i;
    const Polygon ribbon = generate_ribbon(rp);
    const TriMesh mesh = triangulate(ribbon, ribbon.area() / 400.0);
    const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
    check_maximum_principle(map);
    CHECK(map.audit().flipped_triangles == 0);
  }
}

TEST_CASE("linear reproduction holds for arbitrary affine boundary data") {
  const Polygon ribbon = generate_ribbon({90, 25, 1.2, 16, 5});
  const TriMesh mesh = triangulate(ribbon, ribbon.area() / 500.0);
  BoundaryParam bp;
  bp.width = 1e9;  // not a rectangle map; bounds unused here
  bp.height = 1e9;
  auto affine = [](Vec2 p) { return Vec2{0.3 * p.x - 0.9 * p.y + 2.0, 1.1 * p.x + 0.25 * p.y}; };
  for (int v : mesh.boundary_loop) bp.targets.push_back(affine(mesh.vertices[v]));
  const HarmonicMap map = solve_harmonic(mesh, bp);
  for (std::size_t v = 0; v < map.mesh().vertices.size(); ++v)
    CHECK((map.image()[v] - affine(map.mesh().vertices[v])).norm() <= 1e-9 * 200.0);
}

TEST_CASE("check_bijective flags a constructed violation") {
  const TriMesh mesh = triangulate(rect_poly(1, 1), 0.05);
  HarmonicMap good = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
  CHECK(check_bijective(good).flipped_triangles == 0);

  // swap two interior vertex images
  std::vector<Vec2> broken = good.image();
  std::vector<int> interior;
  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  for (int v : good.mesh().boundary_loop) on_boundary[v] = 1;
  for (int v = 0; v < int(good.mesh().vertices.size()); ++v)
    if (!on_boundary[v]) interior.push_back(v);
  REQUIRE(interior.size() >= 2);
  std::swap(broken[interior.front()], broken[interior.back()]);
  const HarmonicMap bad(TriMesh(good.mesh()), std::move(broken), 1.0, 1.0);
  CHECK(check_bijective(bad).flipped_triangles >= 1);
  CHECK_THROWS_AS(bad.inverse({0.5, 0.5}), Error);
}

TEST_CASE("round trip: inverse after forward returns the point") {
  const Polygon ribbon = generate_ribbon({120, 30, 2.0, 20, 11});
  const TriMesh mesh = triangulate(ribbon, ribbon.area() / 800.0);
  const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
  REQUIRE(map.audit().flipped_triangles == 0);
  const double tol = 1e-6 * map.mesh().diameter();
  Rng rng(3);
  const Vec2 lo = ribbon.bbox_min(), hi = ribbon.bbox_max();
  int tested = 0;
  while (tested < 1000) {
    const Vec2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (!point_in_polygon(ribbon, p)) continue;
    ++tested;
    const Vec2 back = map.inverse(map.forward(p));
    CHECK((back - p).norm() <= tol);
  }
}

TEST_CASE("ctr_dims matches closed forms on rectangles") {
  {
    const TriMesh mesh = triangulate(rect_poly(1, 1), 0.02);
    const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
    const auto [wc, hc] = ctr_dims(map);
    CHECK(wc == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hc == doctest::Approx(1.0).epsilon(1e-6));
  }
  {
    const TriMesh mesh = triangulate(rect_poly(4, 1), 0.02);
    const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
    const auto [wc, hc] = ctr_dims(map);
    CHECK(wc == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(hc == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("ctr_dims agrees with the independent grid quadrature on a curved ribbon") {
  const Polygon ribbon = generate_ribbon({150, 30, 2.4, 24, 21});
  const TriMesh mesh = triangulate(ribbon, ribbon.area() / 1500.0);
  const HarmonicMap map = solve_harmonic(mesh, boundary_map(mesh, 1.0, 1.0));
  REQUIRE(map.audit().flipped_triangles == 0);
  const auto [wc, hc] = ctr_dims(map);
  const auto [gw, gh] = grid_quadrature_dims(map, 192);
  CHECK(std::abs(wc - gw) / gw <= 0.01);
  CHECK(std::abs(hc - gh) / gh <= 0.01);
}

TEST_CASE("rescale identity: direct solve equals coordinatewise scaling") {
  const Polygon ribbon = generate_ribbon({100, 28, 1.5, 18, 31});
  const TriMesh mesh = triangulate(ribbon, ribbon.area() / 600.0);
  const HarmonicMap unit = solve_harmonic(TriMesh(mesh), boundary_map(mesh, 1.0, 1.0));
  const HarmonicMap direct = solve_harmonic(TriMesh(mesh), boundary_map(mesh, 3.0, 2.0));
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec2 scaled{3.0 * unit.image()[v].x, 2.0 * unit.image()[v].y};
    CHECK((direct.image()[v] - scaled).norm() <= 1e-8);
  }
}

TEST_CASE("build_ctr returns the exact rectangle for rectangles") {
  const Ctr ctr = build_ctr(rect_poly(64, 32));
  CHECK(ctr.width() == doctest::Approx(64.0).epsilon(1e-6));
  CHECK(ctr.height() == doctest::Approx(32.0).epsilon(1e-6));
  const Vec2 q = ctr.forward({16, 8});
  CHECK(q.x == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(q.y == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("build_ctr handles a semicircular ribbon") {
  const Polygon ribbon = generate_ribbon({160, 30, 3.14159265, 28, 41});
  const Ctr ctr = build_ctr(ribbon);
  CHECK(ctr.unit_map().audit().flipped_triangles == 0);
  CHECK(ctr.width() > ctr.height());
}

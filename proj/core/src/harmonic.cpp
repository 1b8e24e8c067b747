#include "ctr/harmonic.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "ctr/error.hpp"

namespace ctr {

BoundaryParam boundary_map(const TriMesh& mesh, double width, double height) {
  const auto& loop = mesh.boundary_loop;
  const int m = int(loop.size());
  if (m < 4) raise(ErrorCode::DegenerateSide, "boundary loop too short");

  const std::array<Vec2, 4> pins = {Vec2{0.0, height}, Vec2{width, height},
                                    Vec2{width, 0.0}, Vec2{0.0, 0.0}};
  BoundaryParam bp;
  bp.width = width;
  bp.height = height;
  bp.targets.assign(m, Vec2{});

  for (int side = 0; side < 4; ++side) {
    const int from = mesh.corner_pos[side];
    const int to = mesh.corner_pos[(side + 1) % 4];
    const int count = (to - from + m) % m;  // edges on this side (count == 0 means wrap to m)
    const int edges = count == 0 ? m : count;
    double total = 0.0;
    for (int k = 0; k < edges; ++k) {
      const Vec2 a = mesh.vertices[loop[(from + k) % m]];
      const Vec2 b = mesh.vertices[loop[(from + k + 1) % m]];
      total += (b - a).norm();
    }
    if (total <= 0.0) raise(ErrorCode::DegenerateSide, "boundary side has zero length");
    const Vec2 p0 = pins[side];
    const Vec2 p1 = pins[(side + 1) % 4];
    double acc = 0.0;
    bp.targets[from] = p0;
    for (int k = 0; k < edges - 1; ++k) {
      const Vec2 a = mesh.vertices[loop[(from + k) % m]];
      const Vec2 b = mesh.vertices[loop[(from + k + 1) % m]];
      acc += (b - a).norm();
      const double t = acc / total;
      bp.targets[(from + k + 1) % m] = p0 + (p1 - p0) * t;
    }
  }
  return bp;
}

namespace {

BijectivityReport audit_map(const TriMesh& mesh, const std::vector<Vec2>& image) {
  BijectivityReport rep;
  rep.min_signed_area = std::numeric_limits<double>::max();
  for (const auto& t : mesh.triangles) {
    const double a = 0.5 * orient2d(image[t[0]], image[t[1]], image[t[2]]);
    rep.min_signed_area = std::min(rep.min_signed_area, a);
    if (a <= 0.0) ++rep.flipped_triangles;
  }
  if (mesh.triangles.empty()) rep.min_signed_area = 0.0;
  return rep;
}

}  // namespace

HarmonicMap::HarmonicMap(TriMesh mesh, std::vector<Vec2> image, double width, double height)
    : mesh_(std::move(mesh)), image_(std::move(image)), width_(width), height_(height) {
  audit_ = audit_map(mesh_, image_);
  source_locator_ = std::make_unique<TriangleLocator>(
      std::span<const Vec2>(mesh_.vertices), std::span<const std::array<int, 3>>(mesh_.triangles));
  if (audit_.bijective())
    image_locator_ = std::make_unique<TriangleLocator>(
        std::span<const Vec2>(image_), std::span<const std::array<int, 3>>(mesh_.triangles));
}

Vec2 HarmonicMap::forward(Vec2 p) const {
  const BaryHit hit = source_locator_->locate(p);
  const auto& t = mesh_.triangles[hit.tri];
  return image_[t[0]] * hit.bary[0] + image_[t[1]] * hit.bary[1] + image_[t[2]] * hit.bary[2];
}

Vec2 HarmonicMap::inverse(Vec2 q) const {
  if (!image_locator_)
    raise(ErrorCode::NonBijectiveMap, "inverse evaluation refused: map has flipped triangles");
  const BaryHit hit = image_locator_->locate(q);
  const auto& t = mesh_.triangles[hit.tri];
  return mesh_.vertices[t[0]] * hit.bary[0] + mesh_.vertices[t[1]] * hit.bary[1] +
         mesh_.vertices[t[2]] * hit.bary[2];
}

Vec2 forward(const HarmonicMap& map, Vec2 p) { return map.forward(p); }
Vec2 inverse(const HarmonicMap& map, Vec2 q) { return map.inverse(q); }
BijectivityReport check_bijective(const HarmonicMap& map) { return map.audit(); }

HarmonicMap solve_harmonic(TriMesh mesh, const BoundaryParam& bc) {
  const int n = int(mesh.vertices.size());
  if (bc.targets.size() != mesh.boundary_loop.size())
    raise(ErrorCode::FormatError, "boundary data does not match the boundary loop");

  std::vector<int> interior_id(n, -1);
  std::vector<char> is_boundary(n, 0);
  for (int v : mesh.boundary_loop) is_boundary[v] = 1;
  int n_int = 0;
  for (int v = 0; v < n; ++v)
    if (!is_boundary[v]) interior_id[v] = n_int++;

  std::vector<Vec2> image(n);
  for (std::size_t k = 0; k < mesh.boundary_loop.size(); ++k)
    image[mesh.boundary_loop[k]] = bc.targets[k];

  if (n_int > 0) {
    // cotangent stiffness, interior rows split into interior and boundary columns
    std::vector<Eigen::Triplet<double>> tii;
    Eigen::VectorXd rhs_x = Eigen::VectorXd::Zero(n_int);
    Eigen::VectorXd rhs_y = Eigen::VectorXd::Zero(n_int);
    tii.reserve(mesh.triangles.size() * 9);

    auto add = [&](int i, int j, double w) {
      // stiffness entries K_ii += w, K_ij -= w (and symmetrically)
      const int ii = interior_id[i], ij = interior_id[j];
      if (ii >= 0) tii.emplace_back(ii, ii, w);
      if (ij >= 0) tii.emplace_back(ij, ij, w);
      if (ii >= 0 && ij >= 0) {
        tii.emplace_back(ii, ij, -w);
        tii.emplace_back(ij, ii, -w);
      } else if (ii >= 0) {
        rhs_x(ii) += w * image[j].x;
        rhs_y(ii) += w * image[j].y;
      } else if (ij >= 0) {
        rhs_x(ij) += w * image[i].x;
        rhs_y(ij) += w * image[i].y;
      }
    };

    for (const auto& t : mesh.triangles) {
      const Vec2 p0 = mesh.vertices[t[0]];
      const Vec2 p1 = mesh.vertices[t[1]];
      const Vec2 p2 = mesh.vertices[t[2]];
      const double area2 = orient2d(p0, p1, p2);
      if (area2 <= 0.0) continue;
      // half-cotangent weight of the edge opposite each corner
      const double c0 = 0.5 * dot(p1 - p0, p2 - p0) / area2;  // corner 0, edge (1,2)
      const double c1 = 0.5 * dot(p0 - p1, p2 - p1) / area2;
      const double c2 = 0.5 * dot(p0 - p2, p1 - p2) / area2;
      add(t[1], t[2], c0);
      add(t[0], t[2], c1);
      add(t[0], t[1], c2);
    }

    Eigen::SparseMatrix<double> K(n_int, n_int);
    K.setFromTriplets(tii.begin(), tii.end());
    K.makeCompressed();

    auto solve_coord = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
      const double rhs_norm = std::max(rhs.norm(), 1e-300);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd x = ldlt.solve(rhs);
        if (ldlt.info() == Eigen::Success && (K * x - rhs).norm() / rhs_norm <= 1e-10)
          return x;
      }
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(K);
      cg.setTolerance(1e-12);
      cg.setMaxIterations(20 * n_int + 1000);
      Eigen::VectorXd x = cg.solve(rhs);
      if ((K * x - rhs).norm() / rhs_norm > 1e-10)
        raise(ErrorCode::SolverDivergence, "harmonic solve missed the residual target");
      return x;
    };

    const Eigen::VectorXd x = solve_coord(rhs_x);
    const Eigen::VectorXd y = solve_coord(rhs_y);
    for (int v = 0; v < n; ++v)
      if (interior_id[v] >= 0) image[v] = {x(interior_id[v]), y(interior_id[v])};
  }

  return HarmonicMap(std::move(mesh), std::move(image), bc.width, bc.height);
}

std::pair<double, double> ctr_dims(const HarmonicMap& map) {
  if (!map.audit().bijective())
    raise(ErrorCode::NonBijectiveMap, "fiber-length integrals need a bijective map");
  const TriMesh& mesh = map.mesh();
  const auto& image = map.image();
  double wc = 0.0, hc = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    const Vec2 q0 = image[t[0]], q1 = image[t[1]], q2 = image[t[2]];
    const Vec2 e1 = p1 - p0, e2 = p2 - p0;
    const Vec2 f1 = q1 - q0, f2 = q2 - q0;
    const double det_f = cross(f1, f2);
    if (det_f <= 0.0) continue;
    // inverse-map Jacobian: d(source)/d(image) = [e1 e2] * [f1 f2]^{-1}
    const double inv = 1.0 / det_f;
    const Vec2 col_x{(e1.x * f2.y - e2.x * f1.y) * inv, (e1.y * f2.y - e2.y * f1.y) * inv};
    const Vec2 col_y{(-e1.x * f2.x + e2.x * f1.x) * inv, (-e1.y * f2.x + e2.y * f1.x) * inv};
    const double area_img = 0.5 * det_f;
    wc += area_img * col_x.norm();
    hc += area_img * col_y.norm();
  }
  return {wc, hc};
}

Ctr build_ctr(const Polygon& poly, const CtrConfig& config) {
  const double area = poly.area();
  const double max_area =
      config.normalized_area_mode ? 1e-5 * area : config.max_area_fraction * area;
  TriMesh mesh = triangulate(poly, max_area, config.max_vertices);
  const BoundaryParam bc = boundary_map(mesh, 1.0, 1.0);
  HarmonicMap map = solve_harmonic(std::move(mesh), bc);
  if (!map.audit().bijective())
    raise(ErrorCode::NonBijectiveMap, "rectification failed the bijectivity audit");
  const auto [wc, hc] = ctr_dims(map);
  return Ctr(std::move(map), wc, hc);
}

}  // namespace ctr

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_set>
#include <vector>

#include "ctr/error.hpp"
#include "ctr/geometry.hpp"
#include "ctr/trimesh.hpp"

namespace ctr {
namespace {

// Sign of orient2d with a floating-point error filter: the uncertain band
// collapses to 0 so near-degenerate configurations never flip-flop.
int orient_sign(Vec2 a, Vec2 b, Vec2 c) {
  const double detl = (b.x - a.x) * (c.y - a.y);
  const double detr = (b.y - a.y) * (c.x - a.x);
  const double det = detl - detr;
  const double mag = std::abs(detl) + std::abs(detr);
  if (det > 3.4e-16 * mag) return 1;
  if (det < -3.4e-16 * mag) return -1;
  return 0;
}

// > 0 when d is strictly inside the circumcircle of CCW triangle (a, b, c).
int incircle_sign(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bxcy = bdx * cdy, cxby = cdx * bdy;
  const double cxay = cdx * ady, axcy = adx * cdy;
  const double axby = adx * bdy, bxay = bdx * ady;
  const double det = alift * (bxcy - cxby) + blift * (cxay - axcy) + clift * (axby - bxay);
  const double permanent = alift * (std::abs(bxcy) + std::abs(cxby)) +
                           blift * (std::abs(cxay) + std::abs(axcy)) +
                           clift * (std::abs(axby) + std::abs(bxay));
  const double err = 1.2e-15 * permanent;
  if (det > err) return 1;
  if (det < -err) return -1;
  return 0;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

struct Cdt {
  struct Tri {
    std::array<int, 3> v;  // CCW
    std::array<int, 3> n;  // neighbor across edge opposite v[i]; -1 = none
  };

  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<bool> dead;
  std::vector<int> vert_tri;  // some alive triangle incident to each vertex
  std::unordered_set<std::uint64_t> constraints;
  std::vector<int> touched;  // triangles created/changed since last drain

  bool constrained(int a, int b) const { return constraints.count(edge_key(a, b)) != 0; }

  int push_point(Vec2 p) {
    pts.push_back(p);
    vert_tri.push_back(-1);
    return int(pts.size()) - 1;
  }

  int add_tri(int a, int b, int c, int na, int nb, int nc) {
    tris.push_back({{a, b, c}, {na, nb, nc}});
    dead.push_back(false);
    const int id = int(tris.size()) - 1;
    vert_tri[a] = vert_tri[b] = vert_tri[c] = id;
    touched.push_back(id);
    return id;
  }

  void reuse_tri(int id, int a, int b, int c, int na, int nb, int nc) {
    tris[id] = {{a, b, c}, {na, nb, nc}};
    vert_tri[a] = vert_tri[b] = vert_tri[c] = id;
    touched.push_back(id);
  }

  int index_of_vertex(int t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (tris[t].v[i] == v) return i;
    return -1;
  }

  int index_of_neighbor(int t, int u) const {
    for (int i = 0; i < 3; ++i)
      if (tris[t].n[i] == u) return i;
    return -1;
  }

  void set_neighbor(int t, int old_nbr, int new_nbr) {
    if (t < 0) return;
    const int i = index_of_neighbor(t, old_nbr);
    if (i >= 0) tris[t].n[i] = new_nbr;
  }

  double tri_area(int t) const {
    const auto& tr = tris[t];
    return 0.5 * orient2d(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]]);
  }

  // --- point location ---------------------------------------------------

  struct Loc {
    int tri = -1;
    int on_edge = -1;    // edge index within tri, -1 when strictly interior
    int on_vertex = -1;  // vertex id when coincident with an existing point
  };

  Loc classify(int t, Vec2 p, const int signs[3]) const {
    Loc loc;
    loc.tri = t;
    (void)p;
    int zeros = 0, zedge = -1;
    for (int i = 0; i < 3; ++i)
      if (signs[i] == 0) { ++zeros; zedge = i; }
    if (zeros == 1) loc.on_edge = zedge;
    if (zeros >= 2) {
      for (int i = 0; i < 3; ++i)
        if (signs[(i + 1) % 3] == 0 && signs[(i + 2) % 3] == 0) loc.on_vertex = tris[t].v[i];
    }
    return loc;
  }

  Loc locate(Vec2 p, int hint) const {
    int t = hint;
    if (t < 0 || t >= int(tris.size()) || dead[t]) {
      t = -1;
      for (int i = int(tris.size()) - 1; i >= 0; --i)
        if (!dead[i]) { t = i; break; }
    }
    int prev = -1;
    const int max_steps = int(tris.size()) + 64;
    for (int step = 0; step < max_steps && t >= 0; ++step) {
      const auto& tr = tris[t];
      int signs[3];
      for (int i = 0; i < 3; ++i)
        signs[i] = orient_sign(pts[tr.v[(i + 1) % 3]], pts[tr.v[(i + 2) % 3]], p);
      int neg = -1;
      for (int i = 0; i < 3; ++i)
        if (signs[i] < 0 && tr.n[i] >= 0 && tr.n[i] != prev) { neg = i; break; }
      if (neg < 0) {
        bool really_inside = true;
        for (int i = 0; i < 3; ++i)
          if (signs[i] < 0) really_inside = false;
        if (really_inside) return classify(t, p, signs);
        break;  // stuck against boundary or backtrack; fall through to scan
      }
      prev = t;
      t = tr.n[neg];
    }
    for (int i = 0; i < int(tris.size()); ++i) {
      if (dead[i]) continue;
      const auto& tr = tris[i];
      int signs[3];
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        signs[k] = orient_sign(pts[tr.v[(k + 1) % 3]], pts[tr.v[(k + 2) % 3]], p);
        if (signs[k] < 0) inside = false;
      }
      if (inside) return classify(i, p, signs);
    }
    return {};
  }

  // --- structural edits ---------------------------------------------------

  void flip(int t, int i) {
    const int u = tris[t].n[i];
    const int a = tris[t].v[i];
    const int b = tris[t].v[(i + 1) % 3];
    const int c = tris[t].v[(i + 2) % 3];
    int d = -1, u_bd = -1, u_dc = -1;
    for (int k = 0; k < 3; ++k) {
      const int vv = tris[u].v[k];
      if (vv != b && vv != c) d = vv;
      if (vv == c) u_bd = tris[u].n[k];
      if (vv == b) u_dc = tris[u].n[k];
    }
    const int t_ab = tris[t].n[(i + 2) % 3];
    const int t_ca = tris[t].n[(i + 1) % 3];
    reuse_tri(t, a, b, d, u_bd, u, t_ab);
    reuse_tri(u, a, d, c, u_dc, t_ca, t);
    set_neighbor(u_bd, u, t);
    set_neighbor(t_ca, t, u);
  }

  void legalize_from(std::vector<std::pair<int, int>>& stack) {
    std::size_t guard = 0;
    const std::size_t cap = tris.size() * 64 + 4096;
    while (!stack.empty()) {
      if (++guard > cap) break;  // pathological; mesh stays valid, marginally non-Delaunay
      auto [t, i] = stack.back();
      stack.pop_back();
      if (t < 0 || t >= int(tris.size()) || dead[t] || i < 0 || i > 2) continue;
      const int u = tris[t].n[i];
      if (u < 0) continue;
      const int a = tris[t].v[i];
      const int b = tris[t].v[(i + 1) % 3];
      const int c = tris[t].v[(i + 2) % 3];
      if (constrained(b, c)) continue;
      int d = -1;
      for (int k = 0; k < 3; ++k) {
        const int vv = tris[u].v[k];
        if (vv != b && vv != c) { d = vv; break; }
      }
      if (d < 0) continue;
      if (incircle_sign(pts[a], pts[b], pts[c], pts[d]) <= 0) continue;
      if (orient_sign(pts[a], pts[b], pts[d]) <= 0 || orient_sign(pts[a], pts[d], pts[c]) <= 0)
        continue;
      flip(t, i);
      // after flip: t = (a, b, d), u = (a, d, c)
      stack.push_back({t, index_of_vertex(t, a)});
      stack.push_back({t, index_of_vertex(t, d)});
      stack.push_back({u, index_of_vertex(u, a)});
      stack.push_back({u, index_of_vertex(u, c)});
    }
  }

  // Connect existing vertex m to the corners of triangle t (m strictly inside).
  void split_interior(int t, int m) {
    const auto tr = tris[t];
    const int v0 = tr.v[0], v1 = tr.v[1], v2 = tr.v[2];
    const int n0 = tr.n[0], n1 = tr.n[1], n2 = tr.n[2];
    const int t1 = int(tris.size());
    const int t2 = t1 + 1;
    reuse_tri(t, m, v1, v2, n0, t1, t2);
    add_tri(m, v2, v0, n1, t2, t);
    add_tri(m, v0, v1, n2, t, t1);
    set_neighbor(n1, t, t1);
    set_neighbor(n2, t, t2);
    std::vector<std::pair<int, int>> stack{{t, 0}, {t1, 0}, {t2, 0}};
    legalize_from(stack);
  }

  // Insert existing vertex m on the edge of t opposite vertex index it.
  void split_edge(int t, int it, int m) {
    const int vt = tris[t].v[it];
    const int p1 = tris[t].v[(it + 1) % 3];
    const int p2 = tris[t].v[(it + 2) % 3];
    const int u = tris[t].n[it];
    const int nt_ab = tris[t].n[(it + 2) % 3];  // across (vt, p1)
    const int nt_ca = tris[t].n[(it + 1) % 3];  // across (p2, vt)

    if (constrained(p1, p2)) {
      constraints.erase(edge_key(p1, p2));
      constraints.insert(edge_key(p1, m));
      constraints.insert(edge_key(m, p2));
    }

    if (u < 0) {
      const int tb = int(tris.size());
      reuse_tri(t, vt, p1, m, -1, tb, nt_ab);
      add_tri(vt, m, p2, -1, nt_ca, t);
      set_neighbor(nt_ca, t, tb);
      std::vector<std::pair<int, int>> stack{{t, index_of_vertex(t, m)},
                                             {tb, index_of_vertex(tb, m)}};
      legalize_from(stack);
      return;
    }

    int vu = -1, nu_p1side = -1, nu_p2side = -1;
    for (int k = 0; k < 3; ++k) {
      const int vv = tris[u].v[k];
      if (vv != p1 && vv != p2) vu = vv;
      if (vv == p2) nu_p1side = tris[u].n[k];  // across (p1, vu)
      if (vv == p1) nu_p2side = tris[u].n[k];  // across (vu, p2)
    }
    const int tb = int(tris.size());
    const int ub = tb + 1;
    reuse_tri(t, vt, p1, m, ub, tb, nt_ab);
    add_tri(vt, m, p2, u, nt_ca, t);      // tb
    reuse_tri(u, vu, p2, m, tb, ub, nu_p2side);
    add_tri(vu, m, p1, t, nu_p1side, u);  // ub
    set_neighbor(nt_ca, t, tb);
    set_neighbor(nu_p1side, u, ub);
    std::vector<std::pair<int, int>> stack{
        {t, index_of_vertex(t, m)}, {tb, index_of_vertex(tb, m)},
        {u, index_of_vertex(u, m)}, {ub, index_of_vertex(ub, m)}};
    legalize_from(stack);
  }

  // Insert the (already pushed) vertex v into the triangulation.
  // Returns the id actually connected (an existing vertex when coincident).
  int insert_vertex(int v, int hint) {
    const Loc loc = locate(pts[v], hint);
    if (loc.tri < 0) raise(ErrorCode::RefinementFailure, "point location failed");
    if (loc.on_vertex >= 0) return loc.on_vertex;
    if (loc.on_edge >= 0)
      split_edge(loc.tri, loc.on_edge, v);
    else
      split_interior(loc.tri, v);
    return v;
  }

  // --- vertex fans and constraint recovery --------------------------------

  std::vector<int> tris_around(int v) const {
    std::vector<int> out;
    const int start = vert_tri[v];
    if (start < 0 || dead[start]) return out;
    out.push_back(start);
    int cur = start;
    bool closed = false;
    for (int guard = 0; guard < 1 << 20; ++guard) {
      const int iv = index_of_vertex(cur, v);
      if (iv < 0) break;
      const int nxt = tris[cur].n[(iv + 1) % 3];
      if (nxt < 0) break;
      if (nxt == start) { closed = true; break; }
      out.push_back(nxt);
      cur = nxt;
    }
    if (closed) return out;
    cur = start;
    for (int guard = 0; guard < 1 << 20; ++guard) {
      const int iv = index_of_vertex(cur, v);
      if (iv < 0) break;
      const int nxt = tris[cur].n[(iv + 2) % 3];
      if (nxt < 0 || nxt == start) break;
      out.push_back(nxt);
      cur = nxt;
    }
    return out;
  }

  bool edge_exists(int a, int b) const {
    for (int t : tris_around(a))
      if (index_of_vertex(t, b) >= 0) return true;
    return false;
  }

  std::pair<int, int> adjacent_tris(int u, int w) const {
    for (int t : tris_around(u)) {
      const int iu = index_of_vertex(t, u);
      const int o1 = tris[t].v[(iu + 1) % 3];
      const int o2 = tris[t].v[(iu + 2) % 3];
      if (o1 == w) return {t, tris[t].n[(iu + 2) % 3]};
      if (o2 == w) return {t, tris[t].n[(iu + 1) % 3]};
    }
    return {-1, -1};
  }

  bool strictly_crosses(Vec2 a, Vec2 b, Vec2 c, Vec2 d) const {
    const int d1 = orient_sign(a, b, c);
    const int d2 = orient_sign(a, b, d);
    const int d3 = orient_sign(c, d, a);
    const int d4 = orient_sign(c, d, b);
    return d1 * d2 < 0 && d3 * d4 < 0;
  }

  void insert_segment(int a, int b) {
    if (edge_exists(a, b)) {
      constraints.insert(edge_key(a, b));
      return;
    }
    std::deque<std::pair<int, int>> queue;
    int first_tri = -1;
    for (int t : tris_around(a)) {
      const int ia = index_of_vertex(t, a);
      const int u = tris[t].v[(ia + 1) % 3];
      const int w = tris[t].v[(ia + 2) % 3];
      if (strictly_crosses(pts[a], pts[b], pts[u], pts[w])) {
        queue.push_back({u, w});
        first_tri = tris[t].n[ia];
        break;
      }
    }
    if (queue.empty())
      raise(ErrorCode::RefinementFailure, "constraint segment blocked at endpoint");

    // march across the pipe of triangles crossed by (a, b)
    {
      int cur = first_tri;
      int pu = queue.back().first, pw = queue.back().second;
      for (int guard = 0; cur >= 0 && guard < 1 << 20; ++guard) {
        if (index_of_vertex(cur, b) >= 0) break;
        int fu = -1, fw = -1, fedge = -1;
        for (int k = 0; k < 3; ++k) {
          const int e1 = tris[cur].v[(k + 1) % 3];
          const int e2 = tris[cur].v[(k + 2) % 3];
          if ((e1 == pu && e2 == pw) || (e1 == pw && e2 == pu)) continue;
          if (strictly_crosses(pts[a], pts[b], pts[e1], pts[e2])) {
            fu = e1; fw = e2; fedge = k;
            break;
          }
        }
        if (fu < 0) break;
        queue.push_back({fu, fw});
        cur = tris[cur].n[fedge];
        pu = fu; pw = fw;
      }
    }

    std::size_t guard = 0;
    const std::size_t cap = 4096 + tris.size() * std::size_t(64);
    while (!queue.empty()) {
      if (++guard > cap)
        raise(ErrorCode::RefinementFailure, "constraint recovery did not converge");
      auto [u, w] = queue.front();
      queue.pop_front();
      auto [t1, t2] = adjacent_tris(u, w);
      if (t1 < 0 || t2 < 0) continue;  // edge no longer present
      if (!strictly_crosses(pts[a], pts[b], pts[u], pts[w])) continue;
      int p = -1, q = -1;
      for (int k = 0; k < 3; ++k) {
        if (tris[t1].v[k] != u && tris[t1].v[k] != w) p = tris[t1].v[k];
        if (tris[t2].v[k] != u && tris[t2].v[k] != w) q = tris[t2].v[k];
      }
      if (orient_sign(pts[p], pts[q], pts[u]) * orient_sign(pts[p], pts[q], pts[w]) >= 0) {
        queue.push_back({u, w});  // quad not strictly convex yet
        continue;
      }
      flip(t1, index_of_neighbor(t1, t2));
      if (strictly_crosses(pts[a], pts[b], pts[p], pts[q])) queue.push_back({p, q});
    }
    if (!edge_exists(a, b))
      raise(ErrorCode::RefinementFailure, "constraint edge could not be recovered");
    constraints.insert(edge_key(a, b));
  }
};

}  // namespace

double TriMesh::total_area() const {
  double s = 0.0;
  for (std::size_t i = 0; i < triangles.size(); ++i) s += triangle_area(int(i));
  return s;
}

double TriMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * orient2d(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double TriMesh::diameter() const {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec2& v : vertices) {
    lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
  }
  return (hi - lo).norm();
}

TriMesh triangulate(const Polygon& poly, double max_area, std::size_t max_vertices) {
  if (max_area <= 0.0) raise(ErrorCode::RefinementFailure, "max_area must be positive");
  const std::size_t n = poly.size();
  Cdt cdt;
  cdt.pts.reserve(n + 4);
  for (const Vec2& v : poly.vertices) cdt.push_point(v);

  // bounding-box bootstrap (the four corners play the super-triangle role)
  const Vec2 lo = poly.bbox_min(), hi = poly.bbox_max();
  const double pad = 0.25 * (hi - lo).norm() + 1.0;
  const int b0 = cdt.push_point({lo.x - pad, lo.y - pad});
  const int b1 = cdt.push_point({hi.x + pad, lo.y - pad});
  const int b2 = cdt.push_point({hi.x + pad, hi.y + pad});
  const int b3 = cdt.push_point({lo.x - pad, hi.y + pad});
  cdt.add_tri(b0, b1, b2, -1, 1, -1);
  cdt.add_tri(b0, b2, b3, -1, -1, 0);

  int hint = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int got = cdt.insert_vertex(int(i), hint);
    if (got != int(i))
      raise(ErrorCode::NonSimplePolygon, "coincident vertices in polygon");
    hint = cdt.vert_tri[int(i)];
  }

  for (std::size_t i = 0; i < n; ++i)
    cdt.insert_segment(int(i), int((i + 1) % n));

  // global Delaunay pass so every unconstrained edge ends up locally Delaunay
  {
    std::vector<std::pair<int, int>> stack;
    for (int t = 0; t < int(cdt.tris.size()); ++t) {
      if (cdt.dead[t]) continue;
      for (int i = 0; i < 3; ++i) stack.push_back({t, i});
    }
    cdt.legalize_from(stack);
  }

  // remove everything outside the polygon (flood from the box corners)
  {
    std::vector<char> outside(cdt.tris.size(), 0);
    std::deque<int> bfs;
    for (int t = 0; t < int(cdt.tris.size()); ++t) {
      if (cdt.dead[t]) continue;
      for (int i = 0; i < 3; ++i)
        if (cdt.tris[t].v[i] >= b0) { outside[t] = 1; bfs.push_back(t); break; }
    }
    while (!bfs.empty()) {
      const int t = bfs.front();
      bfs.pop_front();
      for (int i = 0; i < 3; ++i) {
        const int u = cdt.tris[t].n[i];
        if (u < 0 || cdt.dead[u] || outside[u]) continue;
        const int e1 = cdt.tris[t].v[(i + 1) % 3];
        const int e2 = cdt.tris[t].v[(i + 2) % 3];
        if (cdt.constrained(e1, e2)) continue;
        outside[u] = 1;
        bfs.push_back(u);
      }
    }
    for (int t = 0; t < int(cdt.tris.size()); ++t) {
      if (cdt.dead[t] || !outside[t]) continue;
      cdt.dead[t] = true;
      for (int i = 0; i < 3; ++i) cdt.set_neighbor(cdt.tris[t].n[i], t, -1);
    }
    for (int t = 0; t < int(cdt.tris.size()); ++t) {
      if (cdt.dead[t]) continue;
      for (int i = 0; i < 3; ++i) cdt.vert_tri[cdt.tris[t].v[i]] = t;
    }
  }

  // boundary side chains (vertex ids in order along each original edge)
  std::vector<std::vector<int>> chains(n);
  for (std::size_t i = 0; i < n; ++i) chains[i] = {int(i), int((i + 1) % n)};
  auto split_chain = [&chains](int u, int w, int m) {
    for (auto& ch : chains) {
      for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
        if ((ch[k] == u && ch[k + 1] == w) || (ch[k] == w && ch[k + 1] == u)) {
          ch.insert(ch.begin() + long(k) + 1, m);
          return;
        }
      }
    }
  };

  // area-driven refinement: circumcenter insertion, splitting a boundary
  // segment instead whenever the walk toward the circumcenter hits one
  if (std::isfinite(max_area)) {
    std::deque<int> big;
    cdt.touched.clear();
    for (int t = 0; t < int(cdt.tris.size()); ++t)
      if (!cdt.dead[t] && cdt.tri_area(t) > max_area) big.push_back(t);

    std::size_t iter_guard = 0;
    while (!big.empty()) {
      if (cdt.pts.size() > max_vertices + 4 || ++iter_guard > 64 * max_vertices + (1 << 16))
        raise(ErrorCode::RefinementFailure, "vertex budget exceeded during refinement");
      const int t = big.front();
      big.pop_front();
      if (t >= int(cdt.tris.size()) || cdt.dead[t]) continue;
      if (cdt.tri_area(t) <= max_area) continue;

      const Vec2 pa = cdt.pts[cdt.tris[t].v[0]];
      const Vec2 pb = cdt.pts[cdt.tris[t].v[1]];
      const Vec2 pc = cdt.pts[cdt.tris[t].v[2]];
      Vec2 cc;
      {
        const double d = 2.0 * orient2d(pa, pb, pc);
        const double a2 = pa.norm2(), b2 = pb.norm2(), c2 = pc.norm2();
        cc.x = (a2 * (pb.y - pc.y) + b2 * (pc.y - pa.y) + c2 * (pa.y - pb.y)) / d;
        cc.y = (a2 * (pc.x - pb.x) + b2 * (pa.x - pc.x) + c2 * (pb.x - pa.x)) / d;
      }
      const Vec2 centroid = (pa + pb + pc) / 3.0;

      int cur = t;
      int blocked_u = -1, blocked_w = -1;
      int reached = -1;
      for (int step = 0; step < 4096; ++step) {
        bool inside = true;
        int exit_edge = -1;
        for (int i = 0; i < 3; ++i) {
          const Vec2 e1 = cdt.pts[cdt.tris[cur].v[(i + 1) % 3]];
          const Vec2 e2 = cdt.pts[cdt.tris[cur].v[(i + 2) % 3]];
          if (orient_sign(e1, e2, cc) < 0) {
            inside = false;
            if (exit_edge < 0 && cdt.strictly_crosses(centroid, cc, e1, e2)) exit_edge = i;
          }
        }
        if (inside) { reached = cur; break; }
        if (exit_edge < 0) {
          for (int i = 0; i < 3; ++i) {
            const Vec2 e1 = cdt.pts[cdt.tris[cur].v[(i + 1) % 3]];
            const Vec2 e2 = cdt.pts[cdt.tris[cur].v[(i + 2) % 3]];
            if (orient_sign(e1, e2, cc) < 0) { exit_edge = i; break; }
          }
        }
        const int e1 = cdt.tris[cur].v[(exit_edge + 1) % 3];
        const int e2 = cdt.tris[cur].v[(exit_edge + 2) % 3];
        if (cdt.constrained(e1, e2) || cdt.tris[cur].n[exit_edge] < 0) {
          blocked_u = e1;
          blocked_w = e2;
          break;
        }
        cur = cdt.tris[cur].n[exit_edge];
      }

      cdt.touched.clear();
      if (blocked_u >= 0) {
        auto [t1, t2] = cdt.adjacent_tris(blocked_u, blocked_w);
        (void)t2;
        if (t1 >= 0) {
          const int iu = cdt.index_of_vertex(t1, blocked_u);
          const int iw = cdt.index_of_vertex(t1, blocked_w);
          const int m = cdt.push_point((cdt.pts[blocked_u] + cdt.pts[blocked_w]) * 0.5);
          cdt.split_edge(t1, 3 - iu - iw, m);
          split_chain(blocked_u, blocked_w, m);
        }
      } else if (reached >= 0) {
        const Cdt::Loc loc = cdt.locate(cc, reached);
        if (loc.tri < 0 || loc.on_vertex >= 0) {
          const int m = cdt.push_point(centroid);
          cdt.split_interior(t, m);  // degenerate circumcenter: centroid fallback
        } else if (loc.on_edge >= 0) {
          const int e1 = cdt.tris[loc.tri].v[(loc.on_edge + 1) % 3];
          const int e2 = cdt.tris[loc.tri].v[(loc.on_edge + 2) % 3];
          if (cdt.constrained(e1, e2)) {
            const int m = cdt.push_point((cdt.pts[e1] + cdt.pts[e2]) * 0.5);
            cdt.split_edge(loc.tri, loc.on_edge, m);
            split_chain(e1, e2, m);
          } else {
            const int m = cdt.push_point(cc);
            cdt.split_edge(loc.tri, loc.on_edge, m);
          }
        } else {
          const int m = cdt.push_point(cc);
          cdt.split_interior(loc.tri, m);
        }
      }
      for (int nt : cdt.touched)
        if (nt < int(cdt.tris.size()) && !cdt.dead[nt] && cdt.tri_area(nt) > max_area)
          big.push_back(nt);
    }
  }

  TriMesh mesh;
  std::vector<int> remap(cdt.pts.size(), -1);
  for (int t = 0; t < int(cdt.tris.size()); ++t) {
    if (cdt.dead[t]) continue;
    for (int i = 0; i < 3; ++i) {
      const int v = cdt.tris[t].v[i];
      if (remap[v] < 0) {
        remap[v] = int(mesh.vertices.size());
        mesh.vertices.push_back(cdt.pts[v]);
      }
    }
  }
  for (int t = 0; t < int(cdt.tris.size()); ++t) {
    if (cdt.dead[t]) continue;
    const auto& tr = cdt.tris[t];
    mesh.triangles.push_back({remap[tr.v[0]], remap[tr.v[1]], remap[tr.v[2]]});
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k + 1 < chains[i].size(); ++k)
      mesh.boundary_loop.push_back(remap[chains[i][k]]);
  std::vector<int> loop_pos_of_original(n, -1);
  {
    int pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      loop_pos_of_original[i] = pos;
      pos += int(chains[i].size()) - 1;
    }
  }
  for (int c = 0; c < 4; ++c)
    mesh.corner_pos[c] = loop_pos_of_original[poly.corners[c]];
  return mesh;
}

}  // namespace ctr

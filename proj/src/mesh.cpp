#include "ebem/mesh.hpp"

#include "ebem/quadrature.hpp"

#include <algorithm>
#include <map>

namespace ebem {

Vec2 Element::ref_corner(ElemShape s, int k) {
  if (s == ElemShape::Tri) {
    static const Vec2 c[3] = {{0, 0}, {1, 0}, {0, 1}};
    return c[k];
  }
  static const Vec2 c[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return c[k];
}

Vec2 Element::uv_at(const Vec2& xhat) const {
  double x = xhat.x(), y = xhat.y();
  if (shape == ElemShape::Quad)
    return (1 - x) * (1 - y) * uv[0] + x * (1 - y) * uv[1] + x * y * uv[2] +
           (1 - x) * y * uv[3];
  if (!apex) return uv[0] + x * (uv[1] - uv[0]) + y * (uv[2] - uv[0]);
  // collapsed cell: ref triangle -> parameter rectangle, s = x/(1-y)
  double s = (y >= 1.0) ? 0.0 : x / (1 - y);
  double t = y;
  return (1 - s) * (1 - t) * uv[0] + s * (1 - t) * uv[1] + s * t * uv[2] +
         (1 - s) * t * uv[3];
}

Eigen::Matrix2d Element::uv_jacobian(const Vec2& xhat) const {
  double x = xhat.x(), y = xhat.y();
  Eigen::Matrix2d J;
  if (shape == ElemShape::Quad) {
    Vec2 du = (1 - y) * (uv[1] - uv[0]) + y * (uv[2] - uv[3]);
    Vec2 dv = (1 - x) * (uv[3] - uv[0]) + x * (uv[2] - uv[1]);
    J.col(0) = du;
    J.col(1) = dv;
    return J;
  }
  if (!apex) {
    J.col(0) = uv[1] - uv[0];
    J.col(1) = uv[2] - uv[0];
    return J;
  }
  double om = 1 - y;
  double s = (om <= 0) ? 0.0 : x / om;
  double t = y;
  Vec2 ds_rect = (1 - t) * (uv[1] - uv[0]) + t * (uv[2] - uv[3]);
  Vec2 dt_rect = (1 - s) * (uv[3] - uv[0]) + s * (uv[2] - uv[1]);
  // chain rule through s = x/(1-y), t = y
  double dsdx = (om <= 0) ? 0.0 : 1.0 / om;
  double dsdy = (om <= 0) ? 0.0 : x / (om * om);
  J.col(0) = ds_rect * dsdx;
  J.col(1) = ds_rect * dsdy + dt_rect;
  return J;
}

bool Element::ref_from_uv(const Vec2& q, Vec2& xhat, double snap) const {
  auto inside01 = [&](double a) { return a >= -snap && a <= 1 + snap; };
  auto clamp01 = [](double a) { return std::clamp(a, 0.0, 1.0); };
  if (shape == ElemShape::Tri && !apex) {
    Eigen::Matrix2d A;
    A.col(0) = uv[1] - uv[0];
    A.col(1) = uv[2] - uv[0];
    Vec2 xy = A.inverse() * (q - uv[0]);
    if (!inside01(xy.x()) || !inside01(xy.y()) || xy.sum() > 1 + snap)
      return false;
    xhat = Vec2(clamp01(xy.x()), clamp01(xy.y()));
    if (xhat.sum() > 1) xhat *= 1.0 / xhat.sum();
    return true;
  }
  // quad cells and apex-cell parameter rectangles are axis-aligned rectangles
  // (up to corner labeling), so the bilinear map is affine and invertible
  Vec2 ds = uv[1] - uv[0], dt = uv[3] - uv[0];
  double s = (q - uv[0]).dot(ds) / ds.squaredNorm();
  double t = (q - uv[0]).dot(dt) / dt.squaredNorm();
  if (!inside01(s) || !inside01(t)) return false;
  s = clamp01(s);
  t = clamp01(t);
  xhat = (shape == ElemShape::Quad) ? Vec2(s, t) : Vec2(s * (1 - t), t);
  return true;
}

Vec3 SurfaceMesh::point(const Patch& patch, int elem, const Vec2& xhat) const {
  Vec2 uv = elements[elem].uv_at(xhat);
  return patch.at(uv.x(), uv.y());
}

Eigen::Matrix<double, 3, 2> SurfaceMesh::tangents(const Patch& patch, int elem,
                                                  const Vec2& xhat) const {
  const Element& el = elements[elem];
  Vec2 uv = el.uv_at(xhat);
  Vec3 pu, pv;
  patch.derivatives(uv.x(), uv.y(), pu, pv);
  Eigen::Matrix<double, 3, 2> P;
  P.col(0) = pu;
  P.col(1) = pv;
  return P * el.uv_jacobian(xhat);
}

namespace {

struct GridDedup {
  double tol;
  std::vector<Vec3> pts;
  std::vector<int> ids;  // per grid index
  std::map<std::array<long long, 3>, std::vector<int>> cells;

  int add(const Vec3& p) {
    std::array<long long, 3> key;
    for (int k = 0; k < 3; ++k) key[k] = (long long)std::floor(p[k] / tol);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == cells.end()) continue;
          for (int id : it->second)
            if ((pts[id] - p).norm() <= tol) return id;
        }
    int id = (int)pts.size();
    pts.push_back(p);
    cells[key].push_back(id);
    return id;
  }
};

void finalize_element(const Patch& patch, const SurfaceMesh& mesh, Element& el) {
  // area / centroid via a tensor rule through the exact map
  auto pts = tensor_rule(el.shape == ElemShape::Tri ? RefDomain::Tri : RefDomain::Quad, 6);
  double area = 0;
  Vec3 cen = Vec3::Zero();
  for (const auto& q : pts) {
    Vec2 xh(q.x, q.y);
    Vec2 uv = el.uv_at(xh);
    Vec3 pu, pv;
    patch.derivatives(uv.x(), uv.y(), pu, pv);
    Eigen::Matrix<double, 3, 2> P;
    P.col(0) = pu;
    P.col(1) = pv;
    Eigen::Matrix<double, 3, 2> J = P * el.uv_jacobian(xh);
    double dj = J.col(0).cross(J.col(1)).norm();
    area += q.w * dj;
    cen += q.w * dj * patch.at(uv.x(), uv.y());
  }
  el.area = area;
  el.centroid = (area > 0) ? Vec3(cen / area) : mesh.vertices[el.v[0]].pos;
  Vec2 c = (el.shape == ElemShape::Tri) ? Vec2(1.0 / 3, 1.0 / 3) : Vec2(0.5, 0.5);
  Vec2 uvc = el.uv_at(c);
  el.normal_c = patch.normal(uvc.x(), uvc.y());
  double diam = 0;
  for (int a = 0; a < el.corner_count(); ++a)
    for (int b = a + 1; b < el.corner_count(); ++b)
      diam = std::max(diam, (mesh.vertices[el.v[a]].pos - mesh.vertices[el.v[b]].pos).norm());
  el.diameter = diam;
}

// orientation: geometric normal must align with the patch normal (flip included)
void orient_element(const Patch& patch, Element& el) {
  Vec2 c = (el.shape == ElemShape::Tri) ? Vec2(1.0 / 3, 1.0 / 3) : Vec2(0.5, 0.5);
  Eigen::Matrix<double, 3, 2> J;
  {
    Vec2 uv = el.uv_at(c);
    Vec3 pu, pv;
    patch.derivatives(uv.x(), uv.y(), pu, pv);
    Eigen::Matrix<double, 3, 2> P;
    P.col(0) = pu;
    P.col(1) = pv;
    J = P * el.uv_jacobian(c);
  }
  Vec2 uvc = el.uv_at(c);
  Vec3 n = patch.normal(uvc.x(), uvc.y());
  if (J.col(0).cross(J.col(1)).dot(n) >= 0) return;
  if (el.shape == ElemShape::Tri) {
    if (el.apex) {
      // mirror the parameter rectangle: swap its s-direction
      std::swap(el.v[0], el.v[1]);
      std::swap(el.uv[0], el.uv[1]);
      std::swap(el.uv[2], el.uv[3]);
    } else {
      std::swap(el.v[1], el.v[2]);
      std::swap(el.uv[1], el.uv[2]);
    }
  } else {
    std::swap(el.v[1], el.v[3]);
    std::swap(el.uv[1], el.uv[3]);
  }
}

double flat_warp_deg(const SurfaceMesh& mesh, const Element& el) {
  if (el.shape != ElemShape::Quad) return 0;
  const Vec3 p0 = mesh.vertices[el.v[0]].pos, p1 = mesh.vertices[el.v[1]].pos,
             p2 = mesh.vertices[el.v[2]].pos, p3 = mesh.vertices[el.v[3]].pos;
  auto tri_n = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    return Vec3((b - a).cross(c - a).normalized());
  };
  double w1 = std::acos(std::clamp(tri_n(p0, p1, p2).dot(tri_n(p0, p2, p3)), -1.0, 1.0));
  double w2 = std::acos(std::clamp(tri_n(p0, p1, p3).dot(tri_n(p1, p2, p3)), -1.0, 1.0));
  return std::max(w1, w2) * 180 / kPi;
}

}  // namespace

SurfaceMesh build_structured_mesh(const Patch& patch, const MeshSpec& spec,
                                  int patch_index, const MeshLimits& limits) {
  patch.check();
  if (spec.nu < 1 || spec.nv < 1)
    throw Error(ErrorStage::Geometry,
                "patch '" + patch.name + "': mesh subdivisions must be >= 1");
  const int nu = spec.nu, nv = spec.nv;

  SurfaceMesh mesh;
  mesh.patch_index = patch_index;

  GridDedup dedup;
  dedup.tol = 1e-10 * std::max(patch.diameter_hint(), 1e-300);

  std::vector<int> grid((nu + 1) * (nv + 1));
  std::vector<Vec2> grid_uv((nu + 1) * (nv + 1));
  auto gid = [&](int i, int j) { return j * (nu + 1) + i; };
  for (int j = 0; j <= nv; ++j)
    for (int i = 0; i <= nu; ++i) {
      double u = double(i) / nu, v = double(j) / nv;
      Vec3 p = patch.at(u, v);
      int id = dedup.add(p);
      grid[gid(i, j)] = id;
      grid_uv[gid(i, j)] = Vec2(u, v);
      if (id == (int)mesh.vertices.size())
        mesh.vertices.push_back({p, Vec2(u, v)});
    }

  auto emit_tri = [&](std::array<int, 3> vv, std::array<Vec2, 3> uv) {
    Element el;
    el.shape = ElemShape::Tri;
    el.v = {vv[0], vv[1], vv[2], -1};
    el.uv = {uv[0], uv[1], uv[2], Vec2::Zero()};
    mesh.elements.push_back(el);
  };
  auto emit_apex_tri = [&](std::array<int, 3> vv, std::array<Vec2, 4> rect_uv) {
    Element el;
    el.shape = ElemShape::Tri;
    el.apex = true;
    el.v = {vv[0], vv[1], vv[2], -1};
    el.uv = rect_uv;
    mesh.elements.push_back(el);
  };

  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) {
      // cell corners counter-clockwise in parameter space
      int c[4] = {grid[gid(i, j)], grid[gid(i + 1, j)], grid[gid(i + 1, j + 1)],
                  grid[gid(i, j + 1)]};
      Vec2 cu[4] = {grid_uv[gid(i, j)], grid_uv[gid(i + 1, j)],
                    grid_uv[gid(i + 1, j + 1)], grid_uv[gid(i, j + 1)]};
      // detect a collapsed side (two adjacent corners merged)
      int collapsed = -1, ncollapsed = 0;
      for (int e = 0; e < 4; ++e)
        if (c[e] == c[(e + 1) % 4]) {
          collapsed = e;
          ++ncollapsed;
        }
      if (ncollapsed > 1 || c[0] == c[2] || c[1] == c[3]) continue;  // zero-area cell
      if (collapsed >= 0) {
        // rotate so the collapsed side is (uv[2],uv[3]); base = (uv[0],uv[1])
        int r = (collapsed + 2) % 4;  // base side starts at corner r
        std::array<int, 3> vv = {c[r], c[(r + 1) % 4], c[(r + 2) % 4]};
        std::array<Vec2, 4> ruv = {cu[r], cu[(r + 1) % 4], cu[(r + 2) % 4],
                                   cu[(r + 3) % 4]};
        emit_apex_tri(vv, ruv);
        continue;
      }
      if (spec.shape == ElemShape::Tri) {
        emit_tri({c[0], c[1], c[2]}, {cu[0], cu[1], cu[2]});
        emit_tri({c[0], c[2], c[3]}, {cu[0], cu[2], cu[3]});
      } else {
        Element el;
        el.shape = ElemShape::Quad;
        el.v = {c[0], c[1], c[2], c[3]};
        el.uv = {cu[0], cu[1], cu[2], cu[3]};
        mesh.elements.push_back(el);
      }
    }

  // split quads warped beyond the limit into parameter-space triangles
  {
    std::vector<Element> out;
    out.reserve(mesh.elements.size());
    for (auto& el : mesh.elements) {
      if (el.shape == ElemShape::Quad &&
          flat_warp_deg(mesh, el) > limits.warp_split_deg) {
        Element t1, t2;
        t1.shape = t2.shape = ElemShape::Tri;
        t1.v = {el.v[0], el.v[1], el.v[2], -1};
        t1.uv = {el.uv[0], el.uv[1], el.uv[2], Vec2::Zero()};
        t2.v = {el.v[0], el.v[2], el.v[3], -1};
        t2.uv = {el.uv[0], el.uv[2], el.uv[3], Vec2::Zero()};
        out.push_back(t1);
        out.push_back(t2);
      } else {
        out.push_back(el);
      }
    }
    mesh.elements = std::move(out);
  }

  for (auto& el : mesh.elements) {
    orient_element(patch, el);
    finalize_element(patch, mesh, el);
  }

  // parameter-edge vertex chains; a fully collapsed edge is not a boundary
  for (int e = 0; e < 4; ++e) {
    std::vector<int>& list = mesh.edge_vertices[e];
    int n = (e < 2) ? nv : nu;
    for (int k = 0; k <= n; ++k) {
      int i, j;
      if (e == 0) { i = 0; j = k; }
      else if (e == 1) { i = nu; j = k; }
      else if (e == 2) { i = k; j = 0; }
      else { i = k; j = nv; }
      int id = grid[gid(i, j)];
      if (list.empty() || list.back() != id) list.push_back(id);
    }
    if (list.size() <= 1) list.clear();  // collapsed edge: not a true boundary
  }
  // a periodic patch (u=0 and u=1 grids identical after dedup) has no true
  // boundary along the seam; drop the seamed chains before taking the union
  // (seam endpoints on a real boundary survive through the other chains)
  for (int pair = 0; pair < 2; ++pair) {
    auto& e0 = mesh.edge_vertices[2 * pair];
    auto& e1 = mesh.edge_vertices[2 * pair + 1];
    if (!e0.empty() && e0 == e1) {
      e0.clear();
      e1.clear();
    }
  }
  for (const auto& lst : mesh.edge_vertices)
    for (int id : lst) mesh.boundary_vertices.push_back(id);
  std::sort(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
  mesh.boundary_vertices.erase(
      std::unique(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end()),
      mesh.boundary_vertices.end());

  mesh.vertex_elements.assign(mesh.vertices.size(), {});
  for (int ei = 0; ei < (int)mesh.elements.size(); ++ei)
    for (int k = 0; k < mesh.elements[ei].corner_count(); ++k)
      mesh.vertex_elements[mesh.elements[ei].v[k]].push_back(ei);

  for (const auto& vtx : mesh.vertices) mesh.bounds.absorb(vtx.pos);
  return mesh;
}

QualityReport mesh_quality(const SurfaceMesh& mesh, const Patch& patch) {
  (void)patch;
  QualityReport q;
  q.min_area = std::numeric_limits<double>::infinity();
  for (const auto& el : mesh.elements) {
    int n = el.corner_count();
    double emin = std::numeric_limits<double>::infinity(), emax = 0;
    for (int k = 0; k < n; ++k) {
      const Vec3& a = mesh.vertices[el.v[k]].pos;
      const Vec3& b = mesh.vertices[el.v[(k + 1) % n]].pos;
      double len = (b - a).norm();
      emin = std::min(emin, len);
      emax = std::max(emax, len);
      const Vec3& c = mesh.vertices[el.v[(k + n - 1) % n]].pos;
      Vec3 e1 = (b - a).normalized(), e2 = (c - a).normalized();
      double ang = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0)) * 180 / kPi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
    }
    q.max_aspect = std::max(q.max_aspect, emax / emin);
    q.min_area = std::min(q.min_area, el.area);
    q.total_area += el.area;
    if (el.shape == ElemShape::Quad)
      q.max_warp_deg = std::max(q.max_warp_deg, flat_warp_deg(mesh, el));
  }
  return q;
}

}  // namespace ebem

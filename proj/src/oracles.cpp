#include "ebem/oracles.hpp"

#include <algorithm>

namespace ebem {

OracleResult sphere_capacitance(double radius) {
  if (!(radius > 0)) throw Error(ErrorStage::Config, "sphere radius must be positive");
  return {4 * kPi * radius, 0, 0, "closed_form"};
}

OracleResult two_sphere_capacitance(double radius, double center_distance, int terms) {
  if (!(radius > 0)) throw Error(ErrorStage::Config, "sphere radius must be positive");
  if (!(center_distance > 2 * radius))
    throw Error(ErrorStage::Config, "spheres must be separated (d > 2R)");
  if (terms < 1) throw Error(ErrorStage::Config, "series needs at least one term");
  double beta = std::acosh(center_distance / (2 * radius));
  double s = 0;
  for (int n = 1; n <= terms; ++n) s += std::sinh(beta) / std::sinh(n * beta);
  // tail bound: sinh(n*beta) >= exp(n*beta)/2 * (1 - exp(-2*beta)) for n > N
  double q = std::exp(-beta);
  double tail = 2 * std::sinh(beta) * std::pow(q, terms + 1) /
                ((1 - q) * (1 - q * q));
  return {2 * kPi * radius * s, 2 * kPi * radius * tail, terms, "image_charge_series"};
}

OracleResult layered_sphere_capacitance(double a, double b, double c, double eps1,
                                        double eps2) {
  if (!(0 < a && a < b && b < c))
    throw Error(ErrorStage::Config, "radii must satisfy 0 < a < b < c");
  if (!(eps1 > 0) || !(eps2 > 0))
    throw Error(ErrorStage::Config, "permittivities must be positive");
  double inv = (1 / eps1) * (1 / a - 1 / b) + (1 / eps2) * (1 / b - 1 / c);
  return {4 * kPi / inv, 0, 0, "series_of_shells"};
}

double potential_flat_polygon(const Vec3& x, const std::vector<Vec3>& poly) {
  const size_t n = poly.size();
  Vec3 nrm = (poly[1] - poly[0]).cross(poly[2] - poly[0]);
  double nlen = nrm.norm();
  if (!(nlen > 0)) return 0;
  nrm /= nlen;

  double tot = 0;
  for (size_t i = 0; i < n; ++i) {
    const Vec3& A = poly[i];
    const Vec3& B = poly[(i + 1) % n];
    Vec3 e = B - A;
    double L = e.norm();
    if (!(L > 0)) continue;
    Vec3 t = e / L;
    Vec3 m = t.cross(nrm);  // outward in-plane normal for CCW ordering
    double s1 = (A - x).dot(t), s2 = (B - x).dot(t);
    double d = (A - x).dot(m);
    double R1 = (A - x).norm(), R2 = (B - x).norm();
    double num = R2 + s2, den = R1 + s1;
    if (num > 0 && den > 0) tot += d * std::log(num / den);
  }

  // solid angle via a triangle fan (van Oosterom-Strackee)
  double omega = 0;
  for (size_t i = 1; i + 1 < n; ++i) {
    Vec3 a = poly[0] - x, b = poly[i] - x, c = poly[i + 1] - x;
    double la = a.norm(), lb = b.norm(), lc = c.norm();
    double num = a.dot(b.cross(c));
    double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    omega += 2 * std::atan2(num, den);
  }
  double h = (x - poly[0]).dot(nrm);
  return (tot - std::abs(h) * std::abs(omega)) / (4 * kPi);
}

Vec3 FlatPanel::at(const Vec2& r) const {
  double u = r.x(), v = r.y();
  if (shape == RefDomain::Tri) return c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0]);
  return (1 - u) * (1 - v) * c[0] + u * (1 - v) * c[1] + u * v * c[2] + (1 - u) * v * c[3];
}

Vec3 FlatPanel::d1(const Vec2& r) const {
  if (shape == RefDomain::Tri) return c[1] - c[0];
  return (1 - r.y()) * (c[1] - c[0]) + r.y() * (c[2] - c[3]);
}

Vec3 FlatPanel::d2(const Vec2& r) const {
  if (shape == RefDomain::Tri) return c[2] - c[0];
  return (1 - r.x()) * (c[3] - c[0]) + r.x() * (c[2] - c[1]);
}

double FlatPanel::area_density(const Vec2& r) const {
  return d1(r).cross(d2(r)).norm();
}

std::vector<Vec3> FlatPanel::polygon() const {
  if (shape == RefDomain::Tri) return {c[0], c[1], c[2]};
  return {c[0], c[1], c[2], c[3]};
}

namespace {

struct RefCell {
  Vec2 lo, hi;
  int depth;
};

// integrate f over the panel's reference domain adaptively (order 4 vs 8)
double adaptive_ref_integral(const FlatPanel& panel,
                             const std::function<double(const Vec2&)>& f,
                             double rel_tol, int max_depth = 14) {
  auto cell_integral = [&](const Vec2& lo, const Vec2& hi, int order) {
    auto pts = tensor_rule(RefDomain::Quad, order);
    double s = 0;
    Vec2 d = hi - lo;
    for (const auto& q : pts) {
      Vec2 ref(lo.x() + q.x * d.x(), lo.y() + q.y * d.y());
      s += q.w * d.x() * d.y() * f(ref) * panel.area_density(ref);
    }
    return s;
  };
  if (panel.shape == RefDomain::Tri) {
    // map: split ref triangle recursively into four similar triangles
    struct TriCell {
      Vec2 a, b, c;
      int depth;
    };
    auto tri_int = [&](const TriCell& t, int order) {
      auto pts = tensor_rule(RefDomain::Tri, order);
      double s = 0;
      double det = std::abs((t.b - t.a).x() * (t.c - t.a).y() -
                            (t.b - t.a).y() * (t.c - t.a).x());
      for (const auto& q : pts) {
        Vec2 ref = t.a + q.x * (t.b - t.a) + q.y * (t.c - t.a);
        s += q.w * det * f(ref) * panel.area_density(ref);
      }
      return s;
    };
    std::vector<TriCell> stack{{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), 0}};
    double total = 0;
    double scale = 0;
    {
      TriCell whole = stack[0];
      scale = std::abs(tri_int(whole, 8));
    }
    while (!stack.empty()) {
      TriCell t = stack.back();
      stack.pop_back();
      double c4 = tri_int(t, 4), c8 = tri_int(t, 8);
      if (std::abs(c8 - c4) <= rel_tol * std::max(scale, 1e-300) || t.depth >= max_depth) {
        total += c8;
        continue;
      }
      Vec2 ab = (t.a + t.b) / 2, bc = (t.b + t.c) / 2, ca = (t.c + t.a) / 2;
      stack.push_back({t.a, ab, ca, t.depth + 1});
      stack.push_back({ab, t.b, bc, t.depth + 1});
      stack.push_back({ca, bc, t.c, t.depth + 1});
      stack.push_back({ab, bc, ca, t.depth + 1});
    }
    return total;
  }
  std::vector<RefCell> stack{{Vec2(0, 0), Vec2(1, 1), 0}};
  double total = 0;
  double scale = std::abs(cell_integral(Vec2(0, 0), Vec2(1, 1), 8));
  while (!stack.empty()) {
    RefCell c = stack.back();
    stack.pop_back();
    double c4 = cell_integral(c.lo, c.hi, 4), c8 = cell_integral(c.lo, c.hi, 8);
    if (std::abs(c8 - c4) <= rel_tol * std::max(scale, 1e-300) || c.depth >= 14) {
      total += c8;
      continue;
    }
    Vec2 mid = (c.lo + c.hi) / 2;
    stack.push_back({c.lo, mid, c.depth + 1});
    stack.push_back({Vec2(mid.x(), c.lo.y()), Vec2(c.hi.x(), mid.y()), c.depth + 1});
    stack.push_back({Vec2(c.lo.x(), mid.y()), Vec2(mid.x(), c.hi.y()), c.depth + 1});
    stack.push_back({mid, c.hi, c.depth + 1});
  }
  return total;
}

}  // namespace

double brute_force_galerkin_p0(const FlatPanel& a, const FlatPanel& b, double rel_tol) {
  auto poly = b.polygon();
  return adaptive_ref_integral(
      a, [&](const Vec2& ref) { return potential_flat_polygon(a.at(ref), poly); },
      rel_tol);
}

double numeric_panel_potential(const FlatPanel& b,
                               const std::function<double(const Vec2&)>& density,
                               const Vec3& x, double rel_tol) {
  // recursive subdivision of the panel around the point's closest approach
  auto kernel = [&](const Vec2& ref) {
    double r = (x - b.at(ref)).norm();
    return density(ref) / (4 * kPi * std::max(r, 1e-300));
  };
  return adaptive_ref_integral(b, kernel, rel_tol, 18);
}

double brute_force_galerkin(const FlatPanel& a,
                            const std::function<double(const Vec2&)>& da,
                            const FlatPanel& b,
                            const std::function<double(const Vec2&)>& db,
                            double rel_tol) {
  return adaptive_ref_integral(
      a,
      [&](const Vec2& ref) {
        return da(ref) * numeric_panel_potential(b, db, a.at(ref), rel_tol * 0.3);
      },
      rel_tol);
}

}  // namespace ebem

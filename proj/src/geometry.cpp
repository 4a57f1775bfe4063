#include "ebem/geometry.hpp"

#include <algorithm>

namespace ebem {

const char* patch_kind_name(PatchKind k) {
  switch (k) {
    case PatchKind::SphereOctant: return "sphere_octant";
    case PatchKind::CylinderSegment: return "cylinder_segment";
    case PatchKind::ConeFrustumSegment: return "cone_frustum_segment";
    case PatchKind::AnnulusSector: return "annulus_sector";
    case PatchKind::BilinearQuad: return "bilinear_quad";
  }
  return "?";
}

void Patch::check() const {
  auto fail = [&](const std::string& m) {
    throw Error(ErrorStage::Geometry, "patch '" + name + "': " + m);
  };
  switch (kind) {
    case PatchKind::SphereOctant:
      if (!(r0 > 0)) fail("sphere radius must be positive");
      break;
    case PatchKind::CylinderSegment:
      if (!(r0 > 0)) fail("cylinder radius must be positive");
      if (!(h != 0)) fail("cylinder height must be nonzero");
      if (!(a1 > a0)) fail("azimuth range must be increasing");
      if (a1 - a0 > 2 * kPi + 1e-12) fail("azimuth range exceeds full turn");
      break;
    case PatchKind::ConeFrustumSegment:
      // Frusta only: a zero radius would put the cone apex (a degenerate
      // parametrization point) on the surface.
      if (!(r0 > 0) || !(r1 > 0)) fail("frustum radii must be positive (apex excluded)");
      if (!(h != 0)) fail("frustum height must be nonzero");
      if (!(a1 > a0)) fail("azimuth range must be increasing");
      if (a1 - a0 > 2 * kPi + 1e-12) fail("azimuth range exceeds full turn");
      break;
    case PatchKind::AnnulusSector:
      if (r0 < 0) fail("inner radius must be nonnegative");
      if (!(r1 > r0)) fail("outer radius must exceed inner radius");
      if (!(a1 > a0)) fail("azimuth range must be increasing");
      if (a1 - a0 > 2 * kPi + 1e-12) fail("azimuth range exceeds full turn");
      break;
    case PatchKind::BilinearQuad: {
      double d = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          d = std::max(d, (corners[i] - corners[j]).norm());
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (!((corners[i] - corners[j]).norm() > 1e-12 * d))
            fail("quad corners coincide (degenerate edge or diagonal)");
      break;
    }
  }
}

Vec3 Patch::local_at(double u, double v) const {
  switch (kind) {
    case PatchKind::SphereOctant: {
      double a = u * kPi / 2, b = v * kPi / 2;
      double cb = std::cos(b);
      return r0 * Vec3(cb * std::cos(a), cb * std::sin(a), std::sin(b));
    }
    case PatchKind::CylinderSegment: {
      double phi = a0 + u * (a1 - a0);
      return Vec3(r0 * std::cos(phi), r0 * std::sin(phi), v * h);
    }
    case PatchKind::ConeFrustumSegment: {
      double phi = a0 + u * (a1 - a0);
      double rho = r0 + v * (r1 - r0);
      return Vec3(rho * std::cos(phi), rho * std::sin(phi), v * h);
    }
    case PatchKind::AnnulusSector: {
      double rho = r0 + u * (r1 - r0);
      double phi = a0 + v * (a1 - a0);
      return Vec3(rho * std::cos(phi), rho * std::sin(phi), 0);
    }
    case PatchKind::BilinearQuad:
      return (1 - u) * (1 - v) * corners[0] + u * (1 - v) * corners[1] +
             u * v * corners[2] + (1 - u) * v * corners[3];
  }
  return Vec3::Zero();
}

void Patch::local_derivatives(double u, double v, Vec3& pu, Vec3& pv) const {
  switch (kind) {
    case PatchKind::SphereOctant: {
      double a = u * kPi / 2, b = v * kPi / 2;
      double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
      pu = r0 * (kPi / 2) * Vec3(-cb * sa, cb * ca, 0);
      pv = r0 * (kPi / 2) * Vec3(-sb * ca, -sb * sa, cb);
      break;
    }
    case PatchKind::CylinderSegment: {
      double phi = a0 + u * (a1 - a0), da = a1 - a0;
      pu = Vec3(-r0 * std::sin(phi) * da, r0 * std::cos(phi) * da, 0);
      pv = Vec3(0, 0, h);
      break;
    }
    case PatchKind::ConeFrustumSegment: {
      double phi = a0 + u * (a1 - a0), da = a1 - a0;
      double rho = r0 + v * (r1 - r0), dr = r1 - r0;
      pu = Vec3(-rho * std::sin(phi) * da, rho * std::cos(phi) * da, 0);
      pv = Vec3(dr * std::cos(phi), dr * std::sin(phi), h);
      break;
    }
    case PatchKind::AnnulusSector: {
      double rho = r0 + u * (r1 - r0), dr = r1 - r0;
      double phi = a0 + v * (a1 - a0), da = a1 - a0;
      pu = Vec3(dr * std::cos(phi), dr * std::sin(phi), 0);
      pv = Vec3(-rho * std::sin(phi) * da, rho * std::cos(phi) * da, 0);
      break;
    }
    case PatchKind::BilinearQuad:
      pu = (1 - v) * (corners[1] - corners[0]) + v * (corners[2] - corners[3]);
      pv = (1 - u) * (corners[3] - corners[0]) + u * (corners[2] - corners[1]);
      break;
  }
}

Vec3 Patch::at(double u, double v) const { return frame.to_world(local_at(u, v)); }

void Patch::derivatives(double u, double v, Vec3& pu, Vec3& pv) const {
  Vec3 lu, lv;
  local_derivatives(u, v, lu, lv);
  pu = frame.dir_to_world(lu);
  pv = frame.dir_to_world(lv);
}

Vec3 Patch::normal(double u, double v) const {
  Vec3 pu, pv;
  derivatives(u, v, pu, pv);
  Vec3 n = pu.cross(pv);
  double len = n.norm();
  if (!(len > 0))
    throw Error(ErrorStage::Geometry,
                "patch '" + name + "': degenerate parametrization point");
  return flip ? Vec3(-n / len) : Vec3(n / len);
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Pick the azimuth parameter in [0,1] nearest to the target angle phi,
// accounting for 2*pi wrap. a(t) = a0 + t*(a1-a0).
double clamp_angle_param(double phi, double a0, double a1) {
  double da = a1 - a0;
  double t = (phi - a0) / da;
  // shift phi by multiples of 2*pi into the best position
  double best_t = clamp01(t);
  double best_err = std::abs(best_t - t);
  for (int k = -1; k <= 1; ++k) {
    if (k == 0) continue;
    double tk = (phi + 2 * kPi * k - a0) / da;
    double ck = clamp01(tk);
    double err = std::abs(ck - tk);
    if (err < best_err) {
      best_err = err;
      best_t = ck;
    }
  }
  return best_t;
}

}  // namespace

ProjectResult Patch::project(const Vec3& q_world, double tol, int max_iter) const {
  Vec3 q = frame.to_local(q_world);
  double u = 0.5, v = 0.5;

  // Closed-form initial guesses where the parametrization is orthogonal.
  switch (kind) {
    case PatchKind::SphereOctant: {
      double rho = std::hypot(q.x(), q.y());
      u = (rho > 0) ? clamp01(std::atan2(q.y(), q.x()) / (kPi / 2)) : 0.5;
      double r = q.norm();
      v = (r > 0) ? clamp01(std::asin(std::clamp(q.z() / r, -1.0, 1.0)) / (kPi / 2)) : 0.5;
      break;
    }
    case PatchKind::CylinderSegment:
    case PatchKind::ConeFrustumSegment:
      u = clamp_angle_param(std::atan2(q.y(), q.x()), a0, a1);
      v = clamp01(q.z() / h);
      break;
    case PatchKind::AnnulusSector: {
      double rho = std::hypot(q.x(), q.y());
      u = clamp01((rho - r0) / (r1 - r0));
      v = clamp_angle_param(std::atan2(q.y(), q.x()), a0, a1);
      break;
    }
    case PatchKind::BilinearQuad: {
      // best of a coarse parameter grid (bilinear maps can have several local minima)
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j) {
          double uu = i / 4.0, vv = j / 4.0;
          double d = (local_at(uu, vv) - q).squaredNorm();
          if (d < best) {
            best = d;
            u = uu;
            v = vv;
          }
        }
      break;
    }
  }

  // One exact 1-D minimization along each coordinate, alternating.
  auto step_u = [&](double vv) -> double {
    switch (kind) {
      case PatchKind::SphereOctant: {
        // maximize q . p(u,vv): A cos(a) + B sin(a), a = u*pi/2
        double cb = std::cos(vv * kPi / 2);
        double A = q.x() * cb, B = q.y() * cb;
        if (A == 0 && B == 0) return u;
        return clamp01(std::atan2(B, A) / (kPi / 2));
      }
      case PatchKind::CylinderSegment:
      case PatchKind::ConeFrustumSegment:
        return clamp_angle_param(std::atan2(q.y(), q.x()), a0, a1);
      case PatchKind::AnnulusSector: {
        // in-plane radial distance is minimized at rho = |q_xy| along the ray
        double cphi = std::cos(a0 + vv * (a1 - a0)), sphi = std::sin(a0 + vv * (a1 - a0));
        double proj = q.x() * cphi + q.y() * sphi;
        return clamp01((proj - r0) / (r1 - r0));
      }
      case PatchKind::BilinearQuad: {
        // p is linear in u for fixed v: project q onto the segment a..b
        Vec3 a = (1 - vv) * corners[0] + vv * corners[3];
        Vec3 b = (1 - vv) * corners[1] + vv * corners[2];
        Vec3 ab = b - a;
        double len2 = ab.squaredNorm();
        if (len2 == 0) return u;
        return clamp01((q - a).dot(ab) / len2);
      }
    }
    return u;
  };
  auto step_v = [&](double uu) -> double {
    switch (kind) {
      case PatchKind::SphereOctant: {
        double a = uu * kPi / 2;
        double A = q.x() * std::cos(a) + q.y() * std::sin(a);
        double B = q.z();
        if (A == 0 && B == 0) return v;
        return clamp01(std::atan2(B, A) / (kPi / 2));
      }
      case PatchKind::CylinderSegment:
        return clamp01(q.z() / h);
      case PatchKind::ConeFrustumSegment: {
        // |p(v)-q|^2 is quadratic in v
        double phi = a0 + uu * (a1 - a0);
        double c = q.x() * std::cos(phi) + q.y() * std::sin(phi);
        double dr = r1 - r0;
        double A = dr * dr + h * h;
        double B = r0 * dr - c * dr - q.z() * h;
        return clamp01(-B / A);
      }
      case PatchKind::AnnulusSector:
        return clamp_angle_param(std::atan2(q.y(), q.x()), a0, a1);
      case PatchKind::BilinearQuad: {
        Vec3 a = (1 - uu) * corners[0] + uu * corners[1];
        Vec3 b = (1 - uu) * corners[3] + uu * corners[2];
        Vec3 ab = b - a;
        double len2 = ab.squaredNorm();
        if (len2 == 0) return v;
        return clamp01((q - a).dot(ab) / len2);
      }
    }
    return v;
  };

  ProjectResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    double un = step_u(v);
    double vn = step_v(un);
    double delta = std::hypot(un - u, vn - v);
    u = un;
    v = vn;
    if (delta <= tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.u = u;
  res.v = v;
  res.point = at(u, v);
  res.distance = (res.point - q_world).norm();
  res.iterations = it;
  return res;
}

Aabb Patch::bbox() const {
  Aabb b;
  const int n = 8;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) b.absorb(at(double(i) / n, double(j) / n));
  return b;
}

double Patch::diameter_hint() const { return bbox().diag(); }

Mat3 octant_rotation(int sx, int sy, int sz) {
  Mat3 s = Vec3(double(sx), double(sy), double(sz)).asDiagonal();
  if (sx * sy * sz > 0) return s;  // even number of reflections: already a rotation
  Mat3 swap;  // exchange x and y (det -1), composing to det +1 overall
  swap << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  return s * swap;
}

}  // namespace ebem

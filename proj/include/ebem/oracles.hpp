#pragma once

#include "ebem/quadrature.hpp"

#include <functional>

namespace ebem {

struct OracleResult {
  double value = 0;
  double est_error = 0;
  int terms = 0;
  std::string method;
};

// Isolated sphere, Gaussian-rationalized units (eps0 = 1): C = 4*pi*R.
OracleResult sphere_capacitance(double radius);

// Two equal spheres at +/-V, image-charge series:
// C = 2*pi*R * sum_{n>=1} sinh(beta)/sinh(n*beta), cosh(beta) = d/(2R),
// d = center distance. est_error bounds the truncated tail.
OracleResult two_sphere_capacitance(double radius, double center_distance, int terms = 60);

// Concentric spherical capacitor, inner electrode radius a, dielectric
// boundary at b (eps1 inside, eps2 outside), outer electrode radius c.
OracleResult layered_sphere_capacitance(double a, double b, double c, double eps1,
                                        double eps2);

// Potential of a unit-density flat polygon (3 or 4 coplanar vertices) at an
// arbitrary point, kernel 1/(4*pi*|x-y|); exact edge-term formula with the
// solid-angle correction.
double potential_flat_polygon(const Vec3& x, const std::vector<Vec3>& poly);

// A flat panel for brute-force integration.
struct FlatPanel {
  RefDomain shape = RefDomain::Tri;
  std::array<Vec3, 4> c{};
  Vec3 at(const Vec2& ref) const;
  Vec3 d1(const Vec2& ref) const;
  Vec3 d2(const Vec2& ref) const;
  double area_density(const Vec2& ref) const;
  std::vector<Vec3> polygon() const;
};

// Galerkin entry int_A int_B U(x,y) dS_y dS_x for constant densities, via the
// exact inner potential and adaptive outer subdivision. Independent of the
// singular-rule machinery.
double brute_force_galerkin_p0(const FlatPanel& a, const FlatPanel& b,
                               double rel_tol = 1e-9);

// Potential of a variable density on a flat panel at point x by recursive
// panel subdivision (no analytic shortcut); density takes panel ref coords.
double numeric_panel_potential(const FlatPanel& b,
                               const std::function<double(const Vec2&)>& density,
                               const Vec3& x, double rel_tol = 1e-7);

// Double-adaptive Galerkin entry with arbitrary densities on both panels
// (slow; intended for spot checks of non-constant shape functions).
double brute_force_galerkin(const FlatPanel& a,
                            const std::function<double(const Vec2&)>& da,
                            const FlatPanel& b,
                            const std::function<double(const Vec2&)>& db,
                            double rel_tol = 1e-6);

}  // namespace ebem

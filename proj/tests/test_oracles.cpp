#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebem/oracles.hpp"

using namespace ebem;

TEST_CASE("isolated sphere capacitance") {
  CHECK(sphere_capacitance(1.0).value == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(sphere_capacitance(2.5).value == doctest::Approx(10 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_capacitance(0), Error);
  CHECK_THROWS_AS(sphere_capacitance(-1), Error);
}

TEST_CASE("two-sphere image series") {
  // single term reduces to 2*pi*R
  auto one = two_sphere_capacitance(1.0, 3.0, 1);
  CHECK(one.value == doctest::Approx(2 * kPi).epsilon(1e-14));

  // value is monotone increasing in the number of terms
  double prev = 0;
  for (int t : {1, 2, 5, 10, 20}) {
    double v = two_sphere_capacitance(1.0, 3.0, t).value;
    CHECK(v > prev);
    prev = v;
  }

  // frozen converged value at d = 3R (surface gap equal to the radius)
  auto full = two_sphere_capacitance(1.0, 3.0, 60);
  CHECK(full.value == doctest::Approx(9.6470174221967902).epsilon(1e-12));
  CHECK(full.est_error < 1e-10);

  // the tail estimate really bounds the truncation error
  for (int t : {3, 6, 12}) {
    auto r = two_sphere_capacitance(1.0, 3.0, t);
    CHECK(std::abs(full.value - r.value) <= r.est_error * 1.0001);
  }

  CHECK_THROWS_AS(two_sphere_capacitance(1.0, 1.9, 10), Error);
  CHECK_THROWS_AS(two_sphere_capacitance(1.0, 3.0, 0), Error);
}

TEST_CASE("layered spherical capacitor") {
  // uniform permittivity limit: plain spherical capacitor 4*pi/(1/a - 1/c)
  auto u = layered_sphere_capacitance(1, 1.5, 2, 1, 1);
  CHECK(u.value == doctest::Approx(4 * kPi / (1.0 - 0.5)).epsilon(1e-14));

  // frozen reference configuration
  auto r = layered_sphere_capacitance(1, 1.5, 2, 5, 1);
  CHECK(r.value == doctest::Approx(53.855874061539313).epsilon(1e-13));

  // independent crosscheck: 1-D radial quadrature of 1/(eps(r) r^2)
  {
    const auto& g = gauss_legendre(20);
    double inv = 0;
    for (int i = 0; i < 20; ++i) {
      double r1 = 1 + 0.5 * g.nodes[i];
      inv += 0.5 * g.weights[i] / (5.0 * r1 * r1);
      double r2 = 1.5 + 0.5 * g.nodes[i];
      inv += 0.5 * g.weights[i] / (1.0 * r2 * r2);
    }
    CHECK(4 * kPi / inv == doctest::Approx(r.value).epsilon(1e-12));
  }

  CHECK_THROWS_AS(layered_sphere_capacitance(2, 1.5, 1, 5, 1), Error);
  CHECK_THROWS_AS(layered_sphere_capacitance(1, 1.5, 2, -5, 1), Error);
}

TEST_CASE("flat polygon potential") {
  std::vector<Vec3> sq = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};

  // at the center: 4*ln(1+sqrt(2))/(4*pi)
  double center = potential_flat_polygon(Vec3(0.5, 0.5, 0), sq);
  CHECK(center == doctest::Approx(4 * std::log(1 + std::sqrt(2.0)) / (4 * kPi)).epsilon(1e-13));

  // slightly above the center: frozen high-precision value
  double above = potential_flat_polygon(Vec3(0.5, 0.5, 0.01), sq);
  CHECK(above == doctest::Approx(3.46322813329897977 / (4 * kPi)).epsilon(1e-12));

  // far away it tends to area/(4*pi*r)
  Vec3 far(100, 40, 250);
  double pf = potential_flat_polygon(far, sq);
  double r = (far - Vec3(0.5, 0.5, 0)).norm();
  CHECK(pf == doctest::Approx(1.0 / (4 * kPi * r)).epsilon(1e-4));

  // independence of vertex ordering direction
  std::vector<Vec3> sq_cw(sq.rbegin(), sq.rend());
  CHECK(potential_flat_polygon(Vec3(0.3, 0.8, 0.2), sq_cw) ==
        doctest::Approx(potential_flat_polygon(Vec3(0.3, 0.8, 0.2), sq)).epsilon(1e-13));
}

TEST_CASE("brute-force Galerkin integrator") {
  FlatPanel A, B;
  A.shape = RefDomain::Quad;
  A.c = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};

  // disjoint far panels: compare with a plain tensor product
  B = A;
  for (auto& c : B.c) c += Vec3(0, 0, 5);
  double bf = brute_force_galerkin_p0(A, B, 1e-10);
  double tp = 0;
  for (const auto& pa : tensor_rule(RefDomain::Quad, 8))
    for (const auto& pb : tensor_rule(RefDomain::Quad, 8)) {
      Vec3 x = A.at(Vec2(pa.x, pa.y)), y = B.at(Vec2(pb.x, pb.y));
      tp += pa.w * pb.w / (4 * kPi * (x - y).norm());
    }
  CHECK(bf == doctest::Approx(tp).epsilon(1e-9));

  // identical-panel entry agrees with the frozen self-energy value
  double self = brute_force_galerkin_p0(A, A, 1e-9);
  CHECK(self == doctest::Approx(0.2366005022046693).epsilon(1e-7));

  // numeric potential with non-constant density approaches analytic constant case
  double p0 = numeric_panel_potential(A, [](const Vec2&) { return 1.0; },
                                      Vec3(0.5, 0.5, 0.01), 1e-8);
  CHECK(p0 == doctest::Approx(3.46322813329897977 / (4 * kPi)).epsilon(1e-6));

  // double-adaptive entry with unit densities matches the p0 path
  double gen = brute_force_galerkin(
      A, [](const Vec2&) { return 1.0; }, B, [](const Vec2&) { return 1.0; }, 1e-7);
  CHECK(gen == doctest::Approx(bf).epsilon(1e-6));
}

// Acceptance suite: one line per criterion, every tolerance pinned here.
// Exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "ebem/oracles.hpp"
#include "ebem/pipeline.hpp"

using namespace ebem;
using nlohmann::json;

namespace {

constexpr double kTwoSphereRef = 9.6470174221967902;   // image-charge series, d = 3R
constexpr double kLayeredRef = 53.855874061539313;      // concentric shells in series
constexpr double kFourPi = 4 * kPi;

struct Criterion {
  std::string name;
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + what);
    }
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

SolveArtifacts solve_scenario(const std::string& name, int k, const std::string& variant) {
  return run_solve(config_from_json(scenario_config(name, k, variant)));
}

double report_capacitance(const json& rep) {
  return rep.at("capacitance")[0].at("value").get<double>();
}

const json& report_group(const json& rep, const std::string& id) {
  for (const auto& g : rep.at("groups"))
    if (g.at("id") == id) return g;
  throw std::runtime_error("group " + id + " missing from report");
}

// ---- small hand-built models reused by criteria 5 and 6 -------------------

Patch flat_square(const std::string& name, int group, const Vec3& origin,
                  const Vec3& ex, const Vec3& ey) {
  Patch p;
  p.kind = PatchKind::BilinearQuad;
  p.name = name;
  p.group = group;
  p.sheet = true;
  p.corners = {origin, origin + ex, origin + ex + ey, origin + ey};
  return p;
}

Patch octant(const std::string& name, int group, double sx, double sy, double sz,
             const Mat3& pre = Mat3::Identity(), const Vec3& shift = Vec3::Zero()) {
  Patch p;
  p.kind = PatchKind::SphereOctant;
  p.name = name;
  p.group = group;
  p.r0 = 1;
  p.frame.R = pre * octant_rotation(sx, sy, sz);
  p.frame.t = shift;
  return p;
}

std::vector<PatchMesh> sphere_parts(int group, int nu, const Mat3& pre = Mat3::Identity(),
                                    const Vec3& shift = Vec3::Zero()) {
  std::vector<PatchMesh> parts;
  int o = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        parts.push_back(
            {octant("o" + std::to_string(o++) + "_g" + std::to_string(group), group,
                    sx, sy, sz, pre, shift),
             {nu, nu, ElemShape::Quad}});
  return parts;
}

struct Built {
  Model model;
  InterfaceLinks links;
  LinearSystem sys;
};

Built assemble(std::vector<RegionGroup> groups, std::vector<PatchMesh> parts,
               const AssemblyOptions& opt = {}) {
  Built b;
  b.model = build_model(std::move(groups), std::move(parts));
  b.links = link_interfaces(b.model.patches, b.model.meshes, b.model.diameter,
                            b.model.tol);
  b.sys = assemble_system(b.model, b.links, opt);
  return b;
}

RegionGroup electrode(const std::string& id, double v) {
  RegionGroup g;
  g.id = id;
  g.tag = RegionTag::Electrode;
  g.voltage = v;
  return g;
}

RegionGroup floating_group(const std::string& id) {
  RegionGroup g;
  g.id = id;
  g.tag = RegionTag::FloatingElectrode;
  return g;
}

FlatPanel panel_of(const Model& m, int mi, int ei) {
  const auto& mesh = m.meshes[mi];
  const auto& el = mesh.elements[ei];
  FlatPanel f;
  f.shape = el.shape == ElemShape::Tri ? RefDomain::Tri : RefDomain::Quad;
  for (int c = 0; c < el.corner_count(); ++c) f.c[c] = mesh.vertices[el.v[c]].pos;
  return f;
}

int shared_corners(const FlatPanel& a, int na, const FlatPanel& b, int nb) {
  int n = 0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      if ((a.c[i] - b.c[j]).norm() < 1e-12) ++n;
  return n;
}

// ---- criteria -------------------------------------------------------------

Criterion two_sphere_criterion() {
  Criterion c;
  c.name = "1 two-sphere capacitance vs image-charge series";
  auto coarse = solve_scenario("two_spheres", 2, "nonconforming");
  double c2 = report_capacitance(coarse.report);
  int dofs2 = coarse.solution.layout.n_total;
  double rel2 = std::abs(c2 / kTwoSphereRef - 1);
  c.require(dofs2 <= 5000, fmt("coarse run uses %d dofs > 5000", dofs2));
  c.require(rel2 <= 1e-2, fmt("coarse rel err %.3e > 1e-2", rel2));

  auto fine = solve_scenario("two_spheres", 3, "nonconforming");
  double c3 = report_capacitance(fine.report);
  int dofs3 = fine.solution.layout.n_total;
  double rel3 = std::abs(c3 / kTwoSphereRef - 1);
  c.require(dofs3 <= 20000, fmt("fine run uses %d dofs > 20000", dofs3));
  c.require(rel3 <= 4.7e-3, fmt("fine rel err %.3e > 4.7e-3", rel3));

  c.detail = fmt("C=%.7f rel=%.2e @%d dofs; C=%.7f rel=%.2e @%d dofs", c2, rel2,
                 dofs2, c3, rel3, dofs3);
  c.notes.push_back(
      fmt("oracle %.16g is the converged series; a published rounded figure of "
          "9.567 sits %.2e away from it and is not used",
          kTwoSphereRef, std::abs(9.567 / kTwoSphereRef - 1)));
  return c;
}

Criterion bushing_criterion() {
  Criterion c;
  c.name = "2 bushing charge agreement and floating-potential grading";
  auto conf = solve_scenario("bushing", 2, "conforming");
  auto nonc = solve_scenario("bushing", 2, "nonconforming");
  double qc = report_group(conf.report, "hv").at("free_charge").get<double>();
  double qn = report_group(nonc.report, "hv").at("free_charge").get<double>();
  double rel = std::abs(qn - qc) / std::abs(qc);
  c.require(rel <= 5e-2, fmt("charge difference %.3e > 5e-2", rel));

  for (const auto* art : {&conf, &nonc}) {
    double prev = 100.0;
    for (int i = 1; i <= 4; ++i) {
      double a = report_group(art->report, "foil" + std::to_string(i))
                     .at("potential")
                     .get<double>();
      c.require(a > 0.0 && a < prev,
                fmt("foil%d potential %.4f not strictly inside (0, %.4f)", i, a, prev));
      prev = a;
    }
  }
  double a1 = report_group(nonc.report, "foil1").at("potential").get<double>();
  double a4 = report_group(nonc.report, "foil4").at("potential").get<double>();
  c.detail = fmt("Q(conforming)=%.6g Q(nonconforming)=%.6g rel=%.2e; "
                 "foils graded %.2f..%.2f within (0, 100)",
                 qc, qn, rel, a1, a4);
  return c;
}

Criterion layered_capacitor_criterion() {
  Criterion c;
  c.name = "3 spherical capacitor with dielectric shell vs shell series";
  auto art = solve_scenario("spherical_capacitor", 2, "");
  double cap = report_capacitance(art.report);
  double rel = std::abs(cap / kLayeredRef - 1);
  c.require(rel <= 1e-2, fmt("rel err %.3e > 1e-2", rel));
  c.detail = fmt("C=%.7f vs %.7f rel=%.2e @%d dofs", cap, kLayeredRef, rel,
                 art.solution.layout.n_total);
  return c;
}

Criterion single_sphere_criterion() {
  Criterion c;
  c.name = "4 unit-sphere capacitance, exterior 1/r decay, interior plateau";
  auto art = solve_scenario("single_sphere", 2, "");
  double cap = report_group(art.report, "ball").at("free_charge").get<double>();
  double rel = std::abs(cap / kFourPi - 1);
  c.require(rel <= 1e-2, fmt("capacitance rel err %.3e > 1e-2", rel));

  double worst_ext = 0;
  for (const auto& p : art.report.at("points")) {
    Vec3 x(p.at("position")[0].get<double>(), p.at("position")[1].get<double>(),
           p.at("position")[2].get<double>());
    double r = x.norm(), u = p.at("potential").get<double>();
    double err = r > 1 ? std::abs(u * r - 1) : std::abs(u - 1);
    worst_ext = std::max(worst_ext, err);
    c.require(err <= 1e-2, fmt("potential at r=%.3g off by %.3e > 1e-2", r, err));
  }
  double worst_int = 0;
  for (const Vec3& x : {Vec3(0.3, 0.2, -0.4), Vec3(-0.6, 0.1, 0.2), Vec3(0, 0, 0.7)}) {
    double u = eval_potential(art.model, art.solution.layout, art.solution.sigma, x);
    worst_int = std::max(worst_int, std::abs(u - 1));
  }
  c.require(worst_int <= 1e-2, fmt("interior deviates %.3e > 1e-2", worst_int));
  c.detail = fmt("C rel=%.2e; worst potential err %.2e exterior, %.2e interior",
                 rel, worst_ext, worst_int);
  return c;
}

Criterion quadrature_criterion() {
  Criterion c;
  c.name = "5 singular and touching pairs vs independent brute-force entries";
  double worst = 0;
  auto check_entry = [&](const std::string& tag, double got, double want) {
    double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    c.require(rel <= 1e-6, fmt("%s rel err %.3e > 1e-6", tag.c_str(), rel));
  };
  Vec3 ex(1, 0, 0), ey(0, 1, 0);
  // The default singular order (6) targets solve accuracy, not entry-level
  // 1e-6; the identical-case transform needs order 10 to reach that here.
  AssemblyOptions sing;
  sing.order_singular = 10;

  {  // identical quad + tri, common edge tri/tri via a split square
    auto q = assemble({electrode("e", 1)},
                      {{flat_square("sq", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Quad}}},
                      sing);
    check_entry("identical quad", q.sys.A(0, 0),
                brute_force_galerkin_p0(panel_of(q.model, 0, 0), panel_of(q.model, 0, 0)));

    auto t = assemble({electrode("e", 1)},
                      {{flat_square("sq", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Tri}}},
                      sing);
    check_entry("identical tri", t.sys.A(0, 0),
                brute_force_galerkin_p0(panel_of(t.model, 0, 0), panel_of(t.model, 0, 0)));
    check_entry("common-edge tri/tri", t.sys.A(0, 1),
                brute_force_galerkin_p0(panel_of(t.model, 0, 0), panel_of(t.model, 0, 1)));
  }
  {  // common edge quad/quad and mixed quad/tri
    auto b = assemble({electrode("e", 1)},
                      {{flat_square("a", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Quad}},
                       {flat_square("b", 0, Vec3(1, 0, 0), ex, ey), {1, 1, ElemShape::Quad}}},
                      sing);
    check_entry("common-edge quad/quad", b.sys.A(0, 1),
                brute_force_galerkin_p0(panel_of(b.model, 0, 0), panel_of(b.model, 1, 0)));

    auto m = assemble({electrode("e", 1)},
                      {{flat_square("a", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Quad}},
                       {flat_square("b", 0, Vec3(1, 0, 0), ex, ey), {1, 1, ElemShape::Tri}}},
                      sing);
    FlatPanel host = panel_of(m.model, 0, 0);
    int found = 0;
    for (int e = 0; e < 2; ++e) {
      FlatPanel f = panel_of(m.model, 1, e);
      if (shared_corners(host, 4, f, 3) == 2) {
        check_entry("common-edge quad/tri", m.sys.A(0, m.sys.layout.global_elem(1, e)),
                    brute_force_galerkin_p0(host, f));
        ++found;
      }
    }
    c.require(found > 0, "no edge-sharing quad/tri pair found");
  }
  {  // common vertex quad/quad and tri/tri at a diagonal corner contact
    auto b = assemble({electrode("e", 1)},
                      {{flat_square("a", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Quad}},
                       {flat_square("b", 0, Vec3(1, 1, 0), ex, ey), {1, 1, ElemShape::Quad}}},
                      sing);
    check_entry("common-vertex quad/quad", b.sys.A(0, 1),
                brute_force_galerkin_p0(panel_of(b.model, 0, 0), panel_of(b.model, 1, 0)));

    auto t = assemble({electrode("e", 1)},
                      {{flat_square("a", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Tri}},
                       {flat_square("b", 0, Vec3(1, 1, 0), ex, ey), {1, 1, ElemShape::Tri}}},
                      sing);
    int found = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        FlatPanel a = panel_of(t.model, 0, i), f = panel_of(t.model, 1, j);
        if (shared_corners(a, 3, f, 3) == 1) {
          check_entry("common-vertex tri/tri",
                      t.sys.A(t.sys.layout.global_elem(0, i),
                              t.sys.layout.global_elem(1, j)),
                      brute_force_galerkin_p0(a, f));
          ++found;
        }
      }
    c.require(found > 0, "no corner-touching tri pair found");
  }
  for (double split : {1.0 / 3.0, 0.5, 1.0 / std::sqrt(2.0)}) {
    // partial edge overlap: a hanging node at the split point
    auto b = assemble({electrode("e", 1)},
                      {{flat_square("a", 0, Vec3(0, 0, 0), ex, ey), {1, 1, ElemShape::Quad}},
                       {flat_square("b", 0, Vec3(1, split, 0), ex, ey), {1, 1, ElemShape::Quad}}},
                      sing);
    double want = brute_force_galerkin_p0(panel_of(b.model, 0, 0), panel_of(b.model, 1, 0));
    check_entry(fmt("hanging split %.4f a->b", split), b.sys.A(0, 1), want);
    check_entry(fmt("hanging split %.4f b->a", split), b.sys.A(1, 0), want);
  }
  c.detail = fmt("worst entry deviation %.2e (bound 1e-6, singular order %d)", worst,
                 sing.order_singular);
  return c;
}

Criterion property_criterion() {
  Criterion c;
  c.name = "6 operator, constraint, and field properties";
  std::vector<std::string> bits;

  {  // V symmetry and positive definiteness on a closed electrode
    auto b = assemble({electrode("ball", 1)}, sphere_parts(0, 2));
    double asym = (b.sys.A - b.sys.A.transpose()).cwiseAbs().maxCoeff();
    double scale = b.sys.A.cwiseAbs().maxCoeff();
    c.require(asym <= 1e-12 * scale, fmt("V asymmetry %.3e", asym / scale));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b.sys.A + b.sys.A.transpose()));
    double lam_min = es.eigenvalues().minCoeff();
    c.require(lam_min > 0, fmt("V not positive definite (lambda_min %.3e)", lam_min));
    bits.push_back(fmt("symmetry %.1e, lambda_min %.2e", asym / scale, lam_min));
  }
  {  // measure conservation under subdivision
    auto area_sum = [](const Model& m) {
      double s = 0;
      for (const auto& mesh : m.meshes)
        for (const auto& el : mesh.elements) s += el.area;
      return s;
    };
    double worst = 0;
    // Full-circle strips tri-split at coarse azimuth carry a 4.9 deg corner;
    // relax the quality gate (these meshes exist to stress the area maps).
    MeshLimits strips;
    strips.min_angle_deg = 4;
    auto compare = [&](PatchKind kind, double exact, double r0, double r1, double h) {
      for (int n : {4, 8, 12})
        for (ElemShape shape : {ElemShape::Quad, ElemShape::Tri}) {
          Patch p;
          p.kind = kind;
          p.name = "m";
          p.group = 0;
          p.sheet = true;
          p.r0 = r0;
          p.r1 = r1;
          p.h = h;
          p.a0 = 0;
          p.a1 = 2 * kPi;
          Model m = build_model({electrode("e", 1)}, {{p, {n, n, shape}}}, strips);
          worst = std::max(worst, std::abs(area_sum(m) / exact - 1));
        }
    };
    compare(PatchKind::CylinderSegment, 2 * kPi * 0.7 * 2.0, 0.7, 0.7, 2.0);
    compare(PatchKind::AnnulusSector, kPi * (1.1 * 1.1 - 0.4 * 0.4), 0.4, 1.1, 0);
    compare(PatchKind::ConeFrustumSegment, kPi * (0.5 + 1.2) * std::hypot(1.2 - 0.5, 0.9), 0.5, 1.2, 0.9);
    for (int n : {1, 3, 5}) {
      Model m = build_model({electrode("e", 1)},
                            {{flat_square("sq", 0, Vec3(0, 0, 0), Vec3(2, 0, 0),
                                          Vec3(0, 3, 0)),
                              {n, n, ElemShape::Quad}}});
      worst = std::max(worst, std::abs(area_sum(m) / 6.0 - 1));
    }
    c.require(worst <= 1e-12, fmt("area drift %.3e > 1e-12", worst));
    bits.push_back(fmt("area drift %.1e", worst));
  }
  {  // floating conductor: zero net charge
    Built b = assemble(
        {electrode("bot", 0), electrode("top", 1), floating_group("sheet")},
        {{flat_square("pb", 0, Vec3(-2, -2, 0), Vec3(4, 0, 0), Vec3(0, 4, 0)),
          {4, 4, ElemShape::Quad}},
         {flat_square("pt", 1, Vec3(-2, -2, 1), Vec3(4, 0, 0), Vec3(0, 4, 0)),
          {4, 4, ElemShape::Quad}},
         {flat_square("fs", 2, Vec3(-0.5, -0.5, 0.5), Vec3(1, 0, 0), Vec3(0, 1, 0)),
          {3, 3, ElemShape::Quad}}});
    Solution sol = solve_system(b.sys);
    double q = group_sigma_integral(b.model, sol.layout, sol.sigma, 2);
    double scale = 0;
    for (int m = 0; m < (int)b.model.meshes.size(); ++m)
      for (int e = 0; e < (int)b.model.meshes[m].elements.size(); ++e)
        scale += b.model.meshes[m].elements[e].area *
                 std::abs(sol.sigma(sol.layout.elem_dof0[sol.layout.global_elem(m, e)]));
    c.require(std::abs(q) <= 1e-8 * scale, fmt("|int sigma| %.3e > 1e-8 scale", std::abs(q)));
    bits.push_back(fmt("floating charge %.1e of scale", std::abs(q) / scale));
  }
  {  // linearity in the drive voltage
    Built b1 = assemble({electrode("ball", 1)}, sphere_parts(0, 1));
    Built b3 = assemble({electrode("ball", 3)}, sphere_parts(0, 1));
    Eigen::VectorXd s1 = solve_system(b1.sys).sigma, s3 = solve_system(b3.sys).sigma;
    double rel = (s3 - 3 * s1).norm() / s3.norm();
    c.require(rel <= 1e-10, fmt("linearity defect %.3e > 1e-10", rel));
    bits.push_back(fmt("linearity %.1e", rel));
  }
  {  // rigid rotation invariance of the solved density and capacitance
    Mat3 rot = (Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized())).toRotationMatrix();
    Built a = assemble({electrode("ball", 1)}, sphere_parts(0, 2));
    Built r = assemble({electrode("ball", 1)}, sphere_parts(0, 2, rot, Vec3(0.3, -0.2, 0.9)));
    Eigen::VectorXd sa = solve_system(a.sys).sigma, sr = solve_system(r.sys).sigma;
    double rel = (sa - sr).norm() / sa.norm();
    c.require(rel <= 1e-9, fmt("rotation changes density by %.3e > 1e-9", rel));
    bits.push_back(fmt("rotation %.1e", rel));
  }
  {  // gradient vs finite differences, far-field decay of the net charge
    std::vector<PatchMesh> parts = sphere_parts(0, 2, Mat3::Identity(), Vec3(-1.5, 0, 0));
    auto parts_b = sphere_parts(1, 2, Mat3::Identity(), Vec3(1.5, 0, 0));
    parts.insert(parts.end(), parts_b.begin(), parts_b.end());
    Built b = assemble({electrode("a", 1), electrode("b", 0)}, parts);
    Solution sol = solve_system(b.sys);

    double worst_fd = 0;
    for (const Vec3& x : {Vec3(0.4, 1.8, 0.6), Vec3(-3.2, 0.5, -0.4)}) {
      Vec3 e = eval_field(b.model, sol.layout, sol.sigma, x);
      Vec3 fd;
      double h = 1e-5;
      for (int k = 0; k < 3; ++k) {
        Vec3 dx = Vec3::Zero();
        dx(k) = h;
        fd(k) = -(eval_potential(b.model, sol.layout, sol.sigma, x + dx) -
                  eval_potential(b.model, sol.layout, sol.sigma, x - dx)) /
                (2 * h);
      }
      worst_fd = std::max(worst_fd, (e - fd).norm() / e.norm());
    }
    c.require(worst_fd <= 1e-3, fmt("gradient vs FD %.3e > 1e-3", worst_fd));

    double q_net = group_free_charge(b.model, sol.layout, sol.sigma, 0) +
                   group_free_charge(b.model, sol.layout, sol.sigma, 1);
    double worst_far = 0;
    for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.5, -0.5, 0.7)}) {
      // the unbalanced drive leaves |dipole| ~ 2.4 q_net, so the monopole
      // dominates to 2% only well past r ~ 120; sample at 480
      double r = 480;
      double u = eval_potential(b.model, sol.layout, sol.sigma, r * dir.normalized());
      worst_far = std::max(worst_far, std::abs(u * 4 * kPi * r / q_net - 1));
    }
    c.require(worst_far <= 2e-2, fmt("far-field decay off by %.3e > 2e-2", worst_far));
    bits.push_back(fmt("grad-vs-FD %.1e, far-field %.1e", worst_fd, worst_far));
  }

  c.detail = bits.empty() ? "" : bits[0];
  for (size_t i = 1; i < bits.size(); ++i) c.detail += "; " + bits[i];
  return c;
}

Criterion determinism_criterion() {
  Criterion c;
  c.name = "7 identical solve invocations yield identical reports";
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("ebem_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  json cfg = {{"schema", 1}, {"scenario", "two_spheres"}, {"refinement", 1}};
  std::ofstream(dir / "cfg.json") << cfg.dump(2);

  auto invoke = [&](const std::string& sub) {
    std::string cmd = std::string(EBEM_BIN) + " solve " + (dir / "cfg.json").string() +
                      " --output-dir " + (dir / sub).string() + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  c.require(invoke("a") == 0, "first invocation failed");
  c.require(invoke("b") == 0, "second invocation failed");
  if (c.pass) {
    auto canon = [&](const std::string& sub) {
      std::ifstream in(dir / sub / "report.json");
      json j = json::parse(in);
      j.erase("timestamp");
      return j.dump(2);
    };
    std::string a = canon("a"), b = canon("b");
    c.require(a == b, "reports differ beyond the timestamp");
    auto bytes = [&](const std::string& sub, const char* f) {
      std::ifstream in(dir / sub / f, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    for (const char* f : {"surface.vtk", "elements.csv", "hanging.csv"})
      c.require(bytes("a", f) == bytes("b", f), std::string(f) + " differs between runs");
    c.detail = fmt("report (%zu bytes) and artifacts byte-identical", a.size());
  }
  fs::remove_all(dir);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using clock = std::chrono::steady_clock;
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  std::vector<Entry> criteria = {
      {"1 two-sphere capacitance vs image-charge series", two_sphere_criterion},
      {"2 bushing charge agreement and floating-potential grading", bushing_criterion},
      {"3 spherical capacitor with dielectric shell vs shell series",
       layered_capacitor_criterion},
      {"4 unit-sphere capacitance, exterior 1/r decay, interior plateau",
       single_sphere_criterion},
      {"5 singular and touching pairs vs independent brute-force entries",
       quadrature_criterion},
      {"6 operator, constraint, and field properties", property_criterion},
      {"7 identical solve invocations yield identical reports", determinism_criterion}};

  if (argc > 1) {  // optional filter by criterion number, for development
    std::vector<Entry> picked;
    for (const auto& entry : criteria)
      for (int i = 1; i < argc; ++i)
        if (entry.name[0] == argv[i][0]) picked.push_back(entry);
    criteria = picked;
  }

  int passed = 0;
  std::printf("== acceptance ==\n");
  for (const auto& entry : criteria) {
    auto t0 = clock::now();
    Criterion c;
    try {
      c = entry.fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.name = entry.name;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("[%s] %s (%.1fs)%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                secs, c.detail.empty() ? "" : " — ", c.detail.c_str());
    for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    passed += c.pass ? 1 : 0;
  }
  std::printf("== %d/%zu criteria passed ==\n", passed, criteria.size());
  return passed == (int)criteria.size() ? 0 : 1;
}

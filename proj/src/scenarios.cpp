#include <functional>

#include "ebem/config.hpp"

namespace ebem {

namespace {

using nlohmann::json;

json rot9(const Mat3& R) {
  json r = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(R(i, k));
  return r;
}

json mesh_spec(int nu, int nv, const char* shape) {
  return {{"nu", nu}, {"nv", nv}, {"shape", shape}};
}

// Eight octant patches covering a full sphere.
void add_sphere(json& patches, const std::string& prefix, const std::string& group,
                double radius, const Vec3& center,
                const std::function<json(int octant)>& mesh_of) {
  int o = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) {
        json p;
        p["kind"] = "sphere_octant";
        p["name"] = prefix + "_o" + std::to_string(o);
        p["group"] = group;
        p["r0"] = radius;
        json f;
        f["rotation"] = rot9(octant_rotation(sx, sy, sz));
        if (center.norm() > 0) f["translation"] = {center.x(), center.y(), center.z()};
        p["frame"] = f;
        p["mesh"] = mesh_of(o);
        patches.push_back(p);
        ++o;
      }
}

json outputs_default() {
  return {{"report", "report.json"},
          {"vtk", "surface.vtk"},
          {"elements", "elements.csv"},
          {"hanging", "hanging.csv"}};
}

json single_sphere(int k) {
  json cfg;
  cfg["schema"] = 1;
  cfg["groups"] = json::array(
      {{{"id", "ball"}, {"tag", "electrode"}, {"voltage", 1.0}, {"eps_ambient", 1.0}}});
  json patches = json::array();
  int nu = 2 * k;
  add_sphere(patches, "ball", "ball", 1.0, Vec3::Zero(),
             [&](int) { return mesh_spec(nu, nu, "quad"); });
  cfg["patches"] = patches;
  cfg["points"] = {{2, 0, 0}, {0, 5, 0}, {0, 0, 100}, {0.25, 0.25, 0.25}};
  cfg["outputs"] = outputs_default();
  return cfg;
}

json two_spheres(int k, bool conforming) {
  json cfg;
  cfg["schema"] = 1;
  cfg["groups"] = json::array(
      {{{"id", "sphere_pos"}, {"tag", "electrode"}, {"voltage", 1.0}},
       {{"id", "sphere_neg"}, {"tag", "electrode"}, {"voltage", -1.0}}});
  json patches = json::array();
  // alternating quad/tri octants give non-conforming arcs between neighbours
  int quad_n = 4 * k, tri_n = 5 * k;
  add_sphere(patches, "pos", "sphere_pos", 1.0, Vec3(1.5, 0, 0), [&](int o) {
    if (conforming || o % 2 == 0) return mesh_spec(quad_n, quad_n, "quad");
    return mesh_spec(tri_n, tri_n, "tri");
  });
  add_sphere(patches, "neg", "sphere_neg", 1.0, Vec3(-1.5, 0, 0), [&](int o) {
    if (conforming || o % 2 == 1) return mesh_spec(quad_n, quad_n, "quad");
    return mesh_spec(tri_n, tri_n, "tri");
  });
  cfg["patches"] = patches;

  // octant poles: the apex corner angle is the azimuthal grid step
  double pole_deg = 90.0 / (conforming ? quad_n : std::max(quad_n, tri_n));
  if (pole_deg < 5) cfg["limits"] = {{"min_angle_deg", 0.8 * pole_deg}};

  cfg["capacitance"] = json::array({json::array({"sphere_pos", "sphere_neg"})});
  cfg["points"] = {{0, 0, 0}, {0, 3, 0}, {6, 0, 0}};
  cfg["outputs"] = outputs_default();
  return cfg;
}

json spherical_capacitor(int k) {
  json cfg;
  cfg["schema"] = 1;
  cfg["groups"] = json::array(
      {{{"id", "inner"}, {"tag", "electrode"}, {"voltage", 1.0}, {"eps_ambient", 5.0}},
       {{"id", "interface"},
        {"tag", "dielectric"},
        {"eps_plus", 1.0},
        {"eps_minus", 5.0}},
       {{"id", "outer"}, {"tag", "electrode"}, {"voltage", 0.0}, {"eps_ambient", 1.0}}});
  json patches = json::array();
  add_sphere(patches, "inner", "inner", 1.0, Vec3::Zero(),
             [&](int) { return mesh_spec(2 * k, 2 * k, "quad"); });
  add_sphere(patches, "iface", "interface", 1.5, Vec3::Zero(),
             [&](int) { return mesh_spec(3 * k, 3 * k, "tri"); });
  add_sphere(patches, "outer", "outer", 2.0, Vec3::Zero(),
             [&](int) { return mesh_spec(2 * k, 2 * k, "quad"); });
  cfg["patches"] = patches;
  cfg["capacitance"] = json::array({json::array({"inner", "outer"})});
  cfg["points"] = {{1.25, 0, 0}, {0, 1.75, 0}, {0, 0, 3}};
  cfg["outputs"] = outputs_default();
  return cfg;
}

// Condenser bushing: a central high-voltage conductor passing through a
// grounded wall opening is graded by floating cylindrical foils embedded in
// a dielectric barrel.
json bushing(int k, bool conforming) {
  json cfg;
  cfg["schema"] = 1;
  json groups = json::array(
      {{{"id", "hv"}, {"tag", "electrode"}, {"voltage", 100.0}, {"eps_ambient", 5.0}},
       {{"id", "gnd"}, {"tag", "electrode"}, {"voltage", 0.0}, {"eps_ambient", 5.0}},
       {{"id", "barrel"}, {"tag", "dielectric"}, {"eps_plus", 1.0}, {"eps_minus", 5.0}}});
  for (int i = 1; i <= 4; ++i)
    groups.push_back(
        {{"id", "foil" + std::to_string(i)}, {"tag", "floating"}, {"eps_ambient", 5.0}});
  cfg["groups"] = groups;

  json patches = json::array();
  auto cylinder = [&](const std::string& name, const std::string& group, double r,
                      double z0, double z1, int az, int nz, bool sheet,
                      const char* shape = "quad") {
    json p;
    p["kind"] = "cylinder";
    p["name"] = name;
    p["group"] = group;
    p["r0"] = r;
    p["h"] = z1 - z0;
    p["a0"] = 0.0;
    p["a1"] = 2 * kPi;
    p["sheet"] = sheet;
    p["frame"] = {{"translation", {0.0, 0.0, z0}}};
    p["mesh"] = mesh_spec(az, nz, shape);
    patches.push_back(p);
  };
  auto cone = [&](const std::string& name, double r_lo, double r_hi, double z0,
                  double z1, int az, int nz) {
    json p;
    p["kind"] = "cone";
    p["name"] = name;
    p["group"] = "barrel";
    p["r0"] = r_lo;
    p["r1"] = r_hi;
    p["h"] = z1 - z0;
    p["a0"] = 0.0;
    p["a1"] = 2 * kPi;
    p["frame"] = {{"translation", {0.0, 0.0, z0}}};
    p["mesh"] = mesh_spec(az, nz, "quad");
    patches.push_back(p);
  };
  auto cap = [&](const std::string& name, double z, bool bottom, int az, int nr) {
    json p;
    p["kind"] = "annulus";
    p["name"] = name;
    p["group"] = "hv";
    p["r0"] = 0.0;
    p["r1"] = 1.0;
    p["a0"] = 0.0;
    p["a1"] = 2 * kPi;
    p["flip"] = bottom;
    p["frame"] = {{"translation", {0.0, 0.0, z}}};
    p["mesh"] = mesh_spec(nr, az, "quad");
    patches.push_back(p);
  };

  // the shared rim circles force equal azimuth counts in the conforming case
  int az_hv = conforming ? 12 * k : 16 * k;
  int az_cap = conforming ? 12 * k : 10 * k;
  int az_cone = 12 * k;
  int az_mid = conforming ? 12 * k : 14 * k;
  int az_foil = 8 * k;

  cylinder("conductor", "hv", 1.0, -16, 16, az_hv, 16 * k, false);
  cap("cap_top", 16, false, az_cap, 3 * k);
  cap("cap_bottom", -16, true, az_cap, 3 * k);
  cone("barrel_lower", 1.0, 7.0, -16, -4, az_cone, 9 * k);
  // the non-conforming variant re-meshes the outer wall with coarse triangles
  if (conforming)
    cylinder("barrel_wall", "barrel", 7.0, -4, 4, az_mid, 6 * k, false);
  else
    cylinder("barrel_wall", "barrel", 7.0, -4, 4, az_mid, 4 * k, false, "tri");
  cone("barrel_upper", 7.0, 1.0, 4, 16, az_cone, 9 * k);

  const double foil_r[5] = {2, 3, 4, 5, 6};
  const double foil_hh[5] = {13, 11, 9, 7, 5};
  for (int i = 0; i < 5; ++i) {
    std::string grp = i == 4 ? "gnd" : "foil" + std::to_string(i + 1);
    cylinder("foil_r" + std::to_string((int)foil_r[i]), grp, foil_r[i], -foil_hh[i],
             foil_hh[i], az_foil, (int)foil_hh[i] * k, true);
  }
  cfg["patches"] = patches;
  cfg["capacitance"] = json::array({json::array({"hv", "gnd"})});
  cfg["points"] = {{0, 2.5, 0}, {0, 0, 20}};
  cfg["outputs"] = outputs_default();
  return cfg;
}

}  // namespace

json scenario_config(const std::string& name, int refinement, const std::string& variant) {
  if (refinement < 1 || refinement > 12)
    throw Error(ErrorStage::Config, "scenario refinement must lie in [1, 12]");
  bool conforming;
  if (variant.empty() || variant == "nonconforming") conforming = false;
  else if (variant == "conforming") conforming = true;
  else throw Error(ErrorStage::Config, "unknown mesh variant '" + variant + "'");

  if (name == "single_sphere") return single_sphere(refinement);
  if (name == "two_spheres") return two_spheres(refinement, conforming);
  if (name == "spherical_capacitor") return spherical_capacitor(refinement);
  if (name == "bushing") return bushing(refinement, conforming);
  throw Error(ErrorStage::Config, "unknown scenario '" + name + "'");
}

}  // namespace ebem

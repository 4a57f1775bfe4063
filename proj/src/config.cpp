#include "ebem/config.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace ebem {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorStage::Config, what);
}

const json& need(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string(where) + ": missing key '" + key + "'");
  return *it;
}

double num(const json& j, const char* where) {
  if (!j.is_number()) bad(std::string(where) + ": expected a number");
  return j.get<double>();
}

double opt_num(const json& j, const char* key, double dflt) {
  auto it = j.find(key);
  return it == j.end() ? dflt : num(*it, key);
}

int opt_int(const json& j, const char* key, int dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer()) bad(std::string(key) + ": expected an integer");
  return it->get<int>();
}

std::string str(const json& j, const char* where) {
  if (!j.is_string()) bad(std::string(where) + ": expected a string");
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 3) bad(std::string(where) + ": expected [x, y, z]");
  return Vec3(num(j[0], where), num(j[1], where), num(j[2], where));
}

RegionTag tag_from(const std::string& s) {
  if (s == "electrode") return RegionTag::Electrode;
  if (s == "floating") return RegionTag::FloatingElectrode;
  if (s == "dielectric") return RegionTag::Dielectric;
  bad("unknown region tag '" + s + "'");
}

PatchKind kind_from(const std::string& s) {
  if (s == "sphere_octant") return PatchKind::SphereOctant;
  if (s == "cylinder") return PatchKind::CylinderSegment;
  if (s == "cone") return PatchKind::ConeFrustumSegment;
  if (s == "annulus") return PatchKind::AnnulusSector;
  if (s == "quad") return PatchKind::BilinearQuad;
  bad("unknown patch kind '" + s + "'");
}

Frame frame_from(const json& j) {
  Frame f;
  if (auto it = j.find("rotation"); it != j.end()) {
    const json& r = *it;
    if (!r.is_array() || r.size() != 9) bad("frame.rotation: expected 9 numbers");
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) f.R(i, k) = num(r[3 * i + k], "frame.rotation");
    if ((f.R * f.R.transpose() - Mat3::Identity()).norm() > 1e-10 ||
        f.R.determinant() < 0)
      bad("frame.rotation: not a proper rotation matrix");
  }
  if (auto it = j.find("translation"); it != j.end())
    f.t = vec3(*it, "frame.translation");
  return f;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) bad("configuration root must be an object");
  if (opt_int(j, "schema", 1) != 1) bad("unsupported schema version");

  RunConfig cfg;

  std::map<std::string, int> group_index;
  const json& groups = need(j, "groups", "config");
  if (!groups.is_array() || groups.empty()) bad("groups: expected a non-empty array");
  for (const auto& jg : groups) {
    RegionGroup g;
    g.id = str(need(jg, "id", "group"), "group.id");
    g.tag = tag_from(str(need(jg, "tag", "group"), "group.tag"));
    g.voltage = opt_num(jg, "voltage", 0);
    g.eps_ambient = opt_num(jg, "eps_ambient", 1);
    g.eps_plus = opt_num(jg, "eps_plus", 1);
    g.eps_minus = opt_num(jg, "eps_minus", 1);
    if (group_index.count(g.id)) bad("duplicate group id '" + g.id + "'");
    group_index[g.id] = (int)cfg.groups.size();
    cfg.groups.push_back(g);
  }

  const json& patches = need(j, "patches", "config");
  if (!patches.is_array() || patches.empty())
    bad("patches: expected a non-empty array");
  for (const auto& jp : patches) {
    PatchMesh pm;
    Patch& p = pm.patch;
    p.kind = kind_from(str(need(jp, "kind", "patch"), "patch.kind"));
    p.name = str(need(jp, "name", "patch"), "patch.name");
    std::string gid = str(need(jp, "group", "patch"), "patch.group");
    auto it = group_index.find(gid);
    if (it == group_index.end())
      bad("patch '" + p.name + "': unknown group '" + gid + "'");
    p.group = it->second;
    p.flip = jp.value("flip", false);
    p.sheet = jp.value("sheet", false);
    p.r0 = opt_num(jp, "r0", 1);
    p.r1 = opt_num(jp, "r1", 1);
    p.h = opt_num(jp, "h", 1);
    p.a0 = opt_num(jp, "a0", 0);
    p.a1 = opt_num(jp, "a1", 2 * kPi);
    if (auto c = jp.find("corners"); c != jp.end()) {
      if (!c->is_array() || c->size() != 4) bad("patch.corners: expected 4 points");
      for (int k = 0; k < 4; ++k) p.corners[k] = vec3((*c)[k], "patch.corners");
    } else if (p.kind == PatchKind::BilinearQuad) {
      bad("patch '" + p.name + "': quad patches need corners");
    }
    if (auto f = jp.find("frame"); f != jp.end()) p.frame = frame_from(*f);

    const json& jm = need(jp, "mesh", "patch");
    pm.spec.nu = opt_int(jm, "nu", 4);
    pm.spec.nv = opt_int(jm, "nv", 4);
    std::string shape = jm.value("shape", "quad");
    if (shape == "quad") pm.spec.shape = ElemShape::Quad;
    else if (shape == "tri") pm.spec.shape = ElemShape::Tri;
    else bad("mesh.shape: expected 'quad' or 'tri'");
    cfg.parts.push_back(pm);
  }

  if (auto it = j.find("space"); it != j.end()) {
    std::string s = str(*it, "space");
    if (s == "p0") cfg.assembly.space = SpaceOrder::P0;
    else if (s == "p1d") cfg.assembly.space = SpaceOrder::P1Disc;
    else bad("space: expected 'p0' or 'p1d'");
  }
  if (auto it = j.find("quadrature"); it != j.end()) {
    const json& q = *it;
    cfg.assembly.order_regular = opt_int(q, "order_regular", cfg.assembly.order_regular);
    cfg.assembly.order_singular =
        opt_int(q, "order_singular", cfg.assembly.order_singular);
    cfg.assembly.order_far = opt_int(q, "order_far", cfg.assembly.order_far);
    cfg.assembly.near_ratio = opt_num(q, "near_ratio", cfg.assembly.near_ratio);
    cfg.assembly.far_ratio = opt_num(q, "far_ratio", cfg.assembly.far_ratio);
    cfg.assembly.near_depth = opt_int(q, "near_depth", cfg.assembly.near_depth);
    if (cfg.assembly.order_regular < 1 || cfg.assembly.order_regular > 12 ||
        cfg.assembly.order_singular < 1 || cfg.assembly.order_singular > 12 ||
        cfg.assembly.order_far < 1 || cfg.assembly.order_far > 12)
      bad("quadrature orders must lie in [1, 12]");
  }
  if (auto it = j.find("tolerances"); it != j.end()) {
    const json& t = *it;
    cfg.tol.gap_rel = opt_num(t, "gap_rel", cfg.tol.gap_rel);
    cfg.tol.cpp_rel = opt_num(t, "cpp_rel", cfg.tol.cpp_rel);
    cfg.tol.ref_snap = opt_num(t, "ref_snap", cfg.tol.ref_snap);
    cfg.tol.cpp_max_iter = opt_int(t, "cpp_max_iter", cfg.tol.cpp_max_iter);
  }
  if (auto it = j.find("limits"); it != j.end()) {
    const json& l = *it;
    cfg.limits.min_angle_deg = opt_num(l, "min_angle_deg", cfg.limits.min_angle_deg);
    cfg.limits.warp_split_deg = opt_num(l, "warp_split_deg", cfg.limits.warp_split_deg);
  }
  if (auto it = j.find("outputs"); it != j.end()) {
    const json& o = *it;
    cfg.outputs.report = o.value("report", "");
    cfg.outputs.vtk = o.value("vtk", "");
    cfg.outputs.elements = o.value("elements", "");
    cfg.outputs.hanging = o.value("hanging", "");
  }
  if (auto it = j.find("points"); it != j.end()) {
    if (!it->is_array()) bad("points: expected an array of [x, y, z]");
    for (const auto& pt : *it) cfg.points.push_back(vec3(pt, "points"));
  }
  if (auto it = j.find("capacitance"); it != j.end()) {
    if (!it->is_array()) bad("capacitance: expected an array of group-id pairs");
    for (const auto& pr : *it) {
      if (!pr.is_array() || pr.size() != 2)
        bad("capacitance: each entry is [positive_id, negative_id]");
      std::string a = str(pr[0], "capacitance"), b = str(pr[1], "capacitance");
      if (!group_index.count(a) || !group_index.count(b))
        bad("capacitance: unknown group id");
      cfg.capacitance.emplace_back(a, b);
    }
  }
  return cfg;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open configuration '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad("malformed JSON in '" + path + "': " + e.what());
  }
}

json expand_scenario(const json& j) {
  if (!j.is_object() || !j.contains("scenario")) return j;
  json full = scenario_config(str(j.at("scenario"), "scenario"),
                              opt_int(j, "refinement", 2),
                              j.contains("variant") ? str(j.at("variant"), "variant") : "");
  for (const char* key : {"space", "quadrature", "tolerances", "limits", "outputs",
                          "points", "capacitance"})
    if (j.contains(key)) full[key] = j.at(key);
  return full;
}

RunConfig load_config(const std::string& path) {
  return config_from_json(expand_scenario(load_json(path)));
}

}  // namespace ebem

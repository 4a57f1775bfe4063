#include "ebem/model.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace ebem {

const char* region_tag_name(RegionTag t) {
  switch (t) {
    case RegionTag::Electrode: return "electrode";
    case RegionTag::FloatingElectrode: return "floating";
    case RegionTag::Dielectric: return "dielectric";
  }
  return "?";
}

double dielectric_lambda(double eps_plus, double eps_minus) {
  if (!(eps_plus > 0) || !(eps_minus > 0))
    throw Error(ErrorStage::Config, "dielectric permittivities must be positive");
  if (std::abs(eps_plus - eps_minus) <= 1e-12 * (eps_plus + eps_minus))
    throw Error(ErrorStage::Config,
                "dielectric interface needs distinct permittivities on the two sides");
  return -(eps_plus + eps_minus) / (2 * (eps_plus - eps_minus));
}

Model build_model(std::vector<RegionGroup> groups, std::vector<PatchMesh> parts,
                  const MeshLimits& limits, const Tolerances& tol) {
  if (groups.empty())
    throw Error(ErrorStage::Config, "model has no region groups");
  if (parts.empty())
    throw Error(ErrorStage::Config, "model has no patches");

  std::set<std::string> ids;
  for (const auto& g : groups) {
    if (g.id.empty())
      throw Error(ErrorStage::Config, "region group with empty id");
    if (!ids.insert(g.id).second)
      throw Error(ErrorStage::Config, "duplicate region group id '" + g.id + "'");
    switch (g.tag) {
      case RegionTag::Electrode:
      case RegionTag::FloatingElectrode:
        if (!(g.eps_ambient > 0))
          throw Error(ErrorStage::Config,
                      "group '" + g.id + "': ambient permittivity must be positive");
        if (!std::isfinite(g.voltage))
          throw Error(ErrorStage::Config, "group '" + g.id + "': voltage is not finite");
        break;
      case RegionTag::Dielectric:
        dielectric_lambda(g.eps_plus, g.eps_minus);  // validates
        break;
    }
  }

  Model model;
  model.groups = std::move(groups);
  model.tol = tol;
  model.limits = limits;

  Aabb box;
  for (auto& part : parts) {
    if (part.patch.group < 0 || part.patch.group >= (int)model.groups.size())
      throw Error(ErrorStage::Config,
                  "patch '" + part.patch.name + "' references an unknown group");
    part.patch.check();
    int pi = (int)model.patches.size();
    model.patches.push_back(part.patch);
    model.meshes.push_back(build_structured_mesh(part.patch, part.spec, pi, limits));
    const SurfaceMesh& mesh = model.meshes.back();

    QualityReport q = mesh_quality(mesh, part.patch);
    if (q.min_angle_deg < limits.min_angle_deg) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "patch '%s': mesh corner angle %.3f deg below the %.3f deg limit",
                    part.patch.name.c_str(), q.min_angle_deg, limits.min_angle_deg);
      throw Error(ErrorStage::Geometry, buf);
    }
    for (const auto& v : mesh.vertices) box.absorb(v.pos);
  }
  model.diameter = box.diag();
  return model;
}

}  // namespace ebem

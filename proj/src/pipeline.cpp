#include "ebem/pipeline.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>

namespace ebem {

namespace {

using nlohmann::json;

int group_index(const Model& model, const std::string& id) {
  for (int g = 0; g < (int)model.groups.size(); ++g)
    if (model.groups[g].id == id) return g;
  throw Error(ErrorStage::Config, "unknown group id '" + id + "'");
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string issue_kind(LinkIssue::Kind k) {
  return k == LinkIssue::NoPartner ? "NoPartner" : "Ambiguous";
}

}  // namespace

SolveArtifacts run_solve(const RunConfig& cfg) {
  SolveArtifacts art;
  art.model = build_model(cfg.groups, cfg.parts, cfg.limits, cfg.tol);
  art.links = link_interfaces(art.model.patches, art.model.meshes,
                              art.model.diameter, art.model.tol);
  if (!art.links.issues.empty()) {
    std::string msg = "interface linking found open or ambiguous boundaries:";
    int shown = 0;
    for (const auto& is : art.links.issues) {
      if (shown == 6) {
        msg += "\n  ... (" + std::to_string(art.links.issues.size()) + " total)";
        break;
      }
      msg += "\n  " + issue_kind(is.kind) + ": " + is.detail;
      ++shown;
    }
    msg += "\nrun `validate` for the full listing";
    throw Error(ErrorStage::Geometry, msg);
  }

  LinearSystem sys = assemble_system(art.model, art.links, cfg.assembly);
  art.solution = solve_system(sys);
  art.report = make_report(art.model, art.links, art.solution, cfg.assembly);

  if (!cfg.points.empty()) {
    json pts = json::array();
    for (const Vec3& x : cfg.points) {
      Vec3 e = eval_field(art.model, art.solution.layout, art.solution.sigma, x);
      pts.push_back(
          {{"position", vec_json(x)},
           {"potential",
            eval_potential(art.model, art.solution.layout, art.solution.sigma, x)},
           {"field", vec_json(e)}});
    }
    art.report["points"] = pts;
  }
  if (!cfg.capacitance.empty()) {
    json caps = json::array();
    for (const auto& [pid, nid] : cfg.capacitance) {
      double c = pair_capacitance(art.model, art.solution,
                                  group_index(art.model, pid),
                                  group_index(art.model, nid));
      caps.push_back({{"between", json::array({pid, nid})}, {"value", c}});
    }
    art.report["capacitance"] = caps;
  }
  return art;
}

json run_validate(const RunConfig& cfg) {
  Model model = build_model(cfg.groups, cfg.parts, cfg.limits, cfg.tol);
  InterfaceLinks links =
      link_interfaces(model.patches, model.meshes, model.diameter, model.tol);

  json diag;
  diag["schema"] = 1;
  diag["mode"] = "validate";
  int verts = 0;
  for (const auto& m : model.meshes) verts += (int)m.vertices.size();
  diag["model"] = {{"meshes", (int)model.meshes.size()},
                   {"elements", model.total_elements()},
                   {"vertices", verts},
                   {"diameter", model.diameter}};

  json qual = json::array();
  for (int m = 0; m < (int)model.meshes.size(); ++m) {
    QualityReport q = mesh_quality(model.meshes[m], model.patches[m]);
    qual.push_back({{"mesh", m},
                    {"patch", model.patches[m].name},
                    {"elements", (int)model.meshes[m].elements.size()},
                    {"min_angle_deg", q.min_angle_deg},
                    {"max_aspect", q.max_aspect},
                    {"max_warp_deg", q.max_warp_deg},
                    {"total_area", q.total_area}});
  }
  diag["quality"] = qual;

  int primaries = 0;
  for (const auto& h : links.nodes) primaries += h.primary ? 1 : 0;
  diag["hanging_nodes"] = primaries;

  json issues = json::array();
  for (const auto& is : links.issues)
    issues.push_back({{"kind", issue_kind(is.kind)},
                      {"mesh", is.mesh},
                      {"vertex", is.vertex},
                      {"detail", is.detail}});
  diag["issues"] = issues;
  diag["ok"] = links.issues.empty();
  return diag;
}

void write_outputs(const SolveArtifacts& art, const RunConfig& cfg,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto in_dir = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

  json rep = art.report;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  rep["timestamp"] = stamp;

  std::string report_name = cfg.outputs.report.empty() ? "report.json" : cfg.outputs.report;
  std::ofstream out(in_dir(report_name));
  if (!out) throw Error(ErrorStage::Config, "cannot write " + in_dir(report_name));
  out << rep.dump(2) << "\n";
  out.close();

  const auto& lay = art.solution.layout;
  if (!cfg.outputs.vtk.empty())
    write_vtk(in_dir(cfg.outputs.vtk), art.model, lay, art.solution.sigma);
  if (!cfg.outputs.elements.empty())
    write_element_csv(in_dir(cfg.outputs.elements), art.model, lay, art.solution.sigma);
  if (!cfg.outputs.hanging.empty())
    write_hanging_csv(in_dir(cfg.outputs.hanging), art.links);
}

}  // namespace ebem

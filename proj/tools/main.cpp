#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ebem/oracles.hpp"
#include "ebem/pipeline.hpp"

namespace {

using ebem::Error;
using ebem::ErrorStage;
using nlohmann::json;

struct Flags {
  std::string output_dir = ".";
  std::string order;
  int quad_regular = 0;  // 0: keep config value
  int quad_singular = 0;
  std::string compare;
  std::string mesh_variant;
  int refinement = 0;
};

void apply_flags(json& raw, ebem::RunConfig& cfg, const Flags& f) {
  if (!f.mesh_variant.empty() || f.refinement > 0) {
    if (!raw.contains("scenario"))
      throw Error(ErrorStage::Config,
                  "--mesh-variant/--refinement apply only to scenario configs");
    if (!f.mesh_variant.empty()) raw["variant"] = f.mesh_variant;
    if (f.refinement > 0) raw["refinement"] = f.refinement;
    cfg = ebem::config_from_json(ebem::expand_scenario(raw));
  }
  if (!f.order.empty()) {
    if (f.order == "p0") cfg.assembly.space = ebem::SpaceOrder::P0;
    else if (f.order == "p1d") cfg.assembly.space = ebem::SpaceOrder::P1Disc;
    else throw Error(ErrorStage::Config, "--order must be p0 or p1d");
  }
  auto quad = [](int n, const char* flag) {
    if (n < 1 || n > 12)
      throw Error(ErrorStage::Config, std::string(flag) + " must lie in [1, 12]");
    return n;
  };
  if (f.quad_regular) cfg.assembly.order_regular = quad(f.quad_regular, "--quad-order-regular");
  if (f.quad_singular)
    cfg.assembly.order_singular = quad(f.quad_singular, "--quad-order-singular");
}

json charge_comparison(const json& rep, const std::string& baseline_path) {
  json base = ebem::load_json(baseline_path);
  json cmp;
  cmp["baseline"] = baseline_path;
  auto find_group = [](const json& r, const std::string& id) -> const json* {
    if (!r.contains("groups")) return nullptr;
    for (const auto& g : r.at("groups"))
      if (g.value("id", "") == id) return &g;
    return nullptr;
  };
  json charges = json::array();
  for (const auto& g : rep.at("groups")) {
    if (!g.contains("free_charge")) continue;
    const json* b = find_group(base, g.at("id"));
    if (!b || !b->contains("free_charge")) continue;
    double q = g.at("free_charge"), q0 = b->at("free_charge");
    charges.push_back({{"id", g.at("id")},
                       {"value", q},
                       {"baseline", q0},
                       {"rel_diff", std::abs(q - q0) / std::max(std::abs(q0), 1e-300)}});
  }
  cmp["charge"] = charges;
  if (rep.contains("capacitance") && base.contains("capacitance")) {
    json caps = json::array();
    for (const auto& c : rep.at("capacitance"))
      for (const auto& c0 : base.at("capacitance"))
        if (c.at("between") == c0.at("between")) {
          double v = c.at("value"), v0 = c0.at("value");
          caps.push_back({{"between", c.at("between")},
                          {"value", v},
                          {"baseline", v0},
                          {"rel_diff", std::abs(v - v0) / std::max(std::abs(v0), 1e-300)}});
        }
    cmp["capacitance"] = caps;
  }
  return cmp;
}

int cmd_solve(const std::string& path, const Flags& f) {
  json raw = ebem::load_json(path);
  ebem::RunConfig cfg = ebem::config_from_json(ebem::expand_scenario(raw));
  apply_flags(raw, cfg, f);

  ebem::SolveArtifacts art = ebem::run_solve(cfg);
  if (!f.compare.empty()) art.report["compare"] = charge_comparison(art.report, f.compare);
  ebem::write_outputs(art, cfg, f.output_dir);

  const auto& lay = art.solution.layout;
  std::printf("solved %d unknowns (%d density + %d floating), residual %.2e\n",
              lay.n_total, lay.n_sigma, lay.n_total - lay.n_sigma,
              art.solution.report.residual_rel);
  if (art.report.contains("capacitance"))
    for (const auto& c : art.report.at("capacitance"))
      std::printf("capacitance %s / %s: %.10g\n",
                  c.at("between")[0].get<std::string>().c_str(),
                  c.at("between")[1].get<std::string>().c_str(),
                  c.at("value").get<double>());
  for (const auto& g : art.report.at("groups"))
    if (g.value("tag", "") == "floating")
      std::printf("floating %s: potential %.8g\n", g.at("id").get<std::string>().c_str(),
                  g.at("potential").get<double>());
  std::string rep_name = cfg.outputs.report.empty() ? "report.json" : cfg.outputs.report;
  std::printf("report: %s\n",
              (std::filesystem::path(f.output_dir) / rep_name).string().c_str());
  return 0;
}

int cmd_validate(const std::string& path) {
  ebem::RunConfig cfg = ebem::load_config(path);
  json diag = ebem::run_validate(cfg);
  std::printf("%s\n", diag.dump(2).c_str());
  return 0;
}

int cmd_oracle(const std::string& name, std::vector<double> p) {
  auto pad = [&](std::initializer_list<double> defaults) {
    if (p.size() > defaults.size())
      throw Error(ErrorStage::Config, "too many parameters for oracle '" + name + "'");
    size_t given = p.size(), i = 0;
    for (double d : defaults)
      if (i++ >= given) p.push_back(d);
  };
  ebem::OracleResult r;
  if (name == "sphere") {
    pad({1.0});
    r = ebem::sphere_capacitance(p[0]);
  } else if (name == "two_spheres") {
    pad({1.0, 3.0});
    r = ebem::two_sphere_capacitance(p[0], p[1]);
  } else if (name == "layered_capacitor") {
    pad({1.0, 1.5, 2.0, 5.0, 1.0});
    r = ebem::layered_sphere_capacitance(p[0], p[1], p[2], p[3], p[4]);
  } else {
    throw Error(ErrorStage::Config,
                "unknown oracle '" + name +
                    "' (sphere, two_spheres, layered_capacitor)");
  }
  json out = {{"name", name},
              {"params", p},
              {"value", r.value},
              {"est_error", r.est_error},
              {"terms", r.terms},
              {"method", r.method}};
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

int cmd_seed(const std::string& name, const Flags& f) {
  int refinement = f.refinement > 0 ? f.refinement : 2;
  // referencing the scenario (rather than expanding it) keeps the file short
  // and lets --mesh-variant / --refinement rework it later
  ebem::scenario_config(name, refinement, f.mesh_variant);  // validate early
  json cfg = {{"schema", 1}, {"scenario", name}, {"refinement", refinement}};
  if (!f.mesh_variant.empty()) cfg["variant"] = f.mesh_variant;
  std::filesystem::create_directories(f.output_dir);
  auto path = std::filesystem::path(f.output_dir) / (name + ".json");
  std::ofstream out(path);
  if (!out) throw Error(ErrorStage::Config, "cannot write " + path.string());
  out << cfg.dump(2) << "\n";
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin boundary-element electrostatics on parametric patch models"};
  app.require_subcommand(0, 1);

  Flags f;
  std::string seed_name;
  app.add_option("--seed-scenario", seed_name,
                 "write a ready-made scenario config (single_sphere, two_spheres, "
                 "spherical_capacitor, bushing) and exit");
  app.add_option("--output-dir", f.output_dir, "directory for generated artifacts")
      ->capture_default_str();
  app.add_option("--order", f.order, "density space: p0 or p1d");
  app.add_option("--quad-order-regular", f.quad_regular,
                 "Gauss order for well-separated pairs");
  app.add_option("--quad-order-singular", f.quad_singular,
                 "Gauss order for singular/touching pairs");
  app.add_option("--compare", f.compare, "baseline report for charge comparison");
  app.add_option("--mesh-variant", f.mesh_variant,
                 "scenario mesh variant: conforming or nonconforming");
  app.add_option("--refinement", f.refinement, "scenario refinement level");

  std::string solve_cfg, validate_cfg, oracle_name;
  std::vector<double> oracle_params;
  CLI::App* solve = app.add_subcommand("solve", "run the full pipeline on a config");
  solve->add_option("config", solve_cfg, "JSON configuration")->required();
  solve->fallthrough();
  CLI::App* validate =
      app.add_subcommand("validate", "build and link only; print diagnostics");
  validate->add_option("config", validate_cfg, "JSON configuration")->required();
  validate->fallthrough();
  CLI::App* oracle = app.add_subcommand("oracle", "print a reference value");
  oracle->add_option("name", oracle_name, "sphere | two_spheres | layered_capacitor")
      ->required();
  oracle->add_option("params", oracle_params, "oracle parameters");
  oracle->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_cfg, f);
    if (validate->parsed()) return cmd_validate(validate_cfg);
    if (oracle->parsed()) return cmd_oracle(oracle_name, oracle_params);
    if (!seed_name.empty()) return cmd_seed(seed_name, f);
    std::printf("%s", app.help().c_str());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage_name(), e.what());
    return static_cast<int>(e.stage());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

#pragma once

#include "ebem/operators.hpp"

#include "json.hpp"

namespace ebem {

struct OutputSpec {
  std::string report;    // JSON run summary
  std::string vtk;       // surface + density
  std::string elements;  // per-element CSV
  std::string hanging;   // hanging-node CSV
};

struct RunConfig {
  std::vector<RegionGroup> groups;
  std::vector<PatchMesh> parts;
  AssemblyOptions assembly;
  Tolerances tol;
  MeshLimits limits;
  OutputSpec outputs;
  std::vector<Vec3> points;  // potential/field probes
  std::vector<std::pair<std::string, std::string>> capacitance;  // group id pairs
};

// Parse and validate a run configuration; unknown enum strings, missing
// required keys, or inconsistent references throw Error(Config).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Read a JSON file, mapping stream and parse failures to Error(Config).
nlohmann::json load_json(const std::string& path);

// If j is scenario-style ({"scenario": name, "refinement": k, "variant": v}),
// generate the full config and carry over any explicitly given sections
// (space, quadrature, tolerances, limits, outputs, points, capacitance).
// Explicit configs pass through unchanged.
nlohmann::json expand_scenario(const nlohmann::json& j);

// Built-in scenario generator; returns a complete explicit configuration.
// Names: single_sphere, two_spheres, spherical_capacitor, bushing.
// Variants (where meaningful): conforming, nonconforming.
nlohmann::json scenario_config(const std::string& name, int refinement,
                               const std::string& variant);

}  // namespace ebem

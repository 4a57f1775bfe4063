#pragma once

#include "ebem/conformity.hpp"

namespace ebem {

enum class RegionTag { Electrode, FloatingElectrode, Dielectric };

const char* region_tag_name(RegionTag t);

struct RegionGroup {
  std::string id;
  RegionTag tag = RegionTag::Electrode;
  double voltage = 0;       // Electrode: prescribed potential
  double eps_ambient = 1;   // Electrode / FloatingElectrode: permittivity of
                            // the surrounding medium (free-charge scaling)
  double eps_plus = 1, eps_minus = 1;  // Dielectric: outside / inside the
                                       // oriented surface (normal points into +)
};

// lambda of the flux-continuity trace equation, -(e+ + e-)/(2 (e+ - e-))
double dielectric_lambda(double eps_plus, double eps_minus);

struct PatchMesh {
  Patch patch;
  MeshSpec spec;
};

struct Model {
  std::vector<RegionGroup> groups;
  std::vector<Patch> patches;
  std::vector<SurfaceMesh> meshes;  // parallel to patches
  double diameter = 0;              // bounding-box diagonal of all meshes
  Tolerances tol;
  MeshLimits limits;

  const RegionGroup& mesh_group(int m) const {
    return groups[patches[m].group];
  }
  int total_elements() const {
    int n = 0;
    for (const auto& m : meshes) n += (int)m.elements.size();
    return n;
  }
};

// Validates groups and patches, meshes every patch, and refuses meshes whose
// worst corner angle falls below the configured limit.
Model build_model(std::vector<RegionGroup> groups, std::vector<PatchMesh> parts,
                  const MeshLimits& limits = {}, const Tolerances& tol = {});

}  // namespace ebem

#pragma once

#include "ebem/solver.hpp"

#include "json.hpp"

namespace ebem {

// Density value at an element reference point.
double sigma_at(const Model& model, const DofLayout& lay,
                const Eigen::VectorXd& sigma, int mesh, int elem, const Vec2& ref);

struct EvalOptions {
  int order = 4;      // leaf Gauss order per axis
  double near = 2.0;  // subdivide while gap < near * piece diameter
  int max_depth = 12;
};

// Potential and field of the solved density at a world point, by
// distance-adaptive panel subdivision. Accuracy degrades for points on or
// extremely close to the surface (the subdivision is depth-capped).
double eval_potential(const Model& model, const DofLayout& lay,
                      const Eigen::VectorXd& sigma, const Vec3& x,
                      const EvalOptions& opt = {});
Vec3 eval_field(const Model& model, const DofLayout& lay,
                const Eigen::VectorXd& sigma, const Vec3& x,
                const EvalOptions& opt = {});

// Integral of the solved density over all meshes of a region group, and the
// free charge (scaled by the group's ambient permittivity).
double group_sigma_integral(const Model& model, const DofLayout& lay,
                            const Eigen::VectorXd& sigma, int group);
double group_free_charge(const Model& model, const DofLayout& lay,
                         const Eigen::VectorXd& sigma, int group);
double group_area(const Model& model, int group);

// Prescribed voltage of an electrode group or the solved floating potential.
double group_potential(const Model& model, const Solution& sol, int group);

// Free charge of `pos` divided by the potential difference to `neg`.
double pair_capacitance(const Model& model, const Solution& sol, int pos, int neg);

void write_vtk(const std::string& path, const Model& model, const DofLayout& lay,
               const Eigen::VectorXd& sigma);
void write_element_csv(const std::string& path, const Model& model,
                       const DofLayout& lay, const Eigen::VectorXd& sigma);
// Primary hanging-node records (one line per foreign vertex and host element).
void write_hanging_csv(const std::string& path, const InterfaceLinks& links);

// Deterministic run summary (no timestamps; keys sorted by nlohmann).
nlohmann::json make_report(const Model& model, const InterfaceLinks& links,
                           const Solution& sol, const AssemblyOptions& opt);

}  // namespace ebem

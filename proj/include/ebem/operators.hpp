#pragma once

#include "ebem/model.hpp"
#include "ebem/quadrature.hpp"

namespace ebem {

enum class SpaceOrder { P0, P1Disc };

struct AssemblyOptions {
  SpaceOrder space = SpaceOrder::P0;
  int order_regular = 4;    // mid-range pairs
  int order_singular = 6;   // coincident / touching pairs (per coordinate)
  int order_far = 2;        // pairs beyond far_ratio * max diameter
  double far_ratio = 8.0;
  // Disjoint pairs closer than near_ratio * max diameter are integrated by
  // recursive bisection of the larger panel, at most near_depth levels deep.
  double near_ratio = 0.3;
  int near_depth = 4;
};

// Element-wise discontinuous dofs in mesh order, followed by one auxiliary
// potential column/constraint row per floating-electrode group.
struct DofLayout {
  SpaceOrder space = SpaceOrder::P0;
  std::vector<int> mesh_elem0;  // mesh -> global element offset (size nmesh+1)
  std::vector<int> elem_dof0;   // global element -> first dof (size nelem+1)
  int n_sigma = 0;
  int n_total = 0;
  std::vector<int> constraint_of_group;  // group -> row index, -1 if none
  std::vector<int> dof_mesh, dof_elem, dof_local;  // per sigma dof

  int global_elem(int mesh, int elem) const { return mesh_elem0[mesh] + elem; }
  int ndof(int ge) const { return elem_dof0[ge + 1] - elem_dof0[ge]; }
};

DofLayout make_dof_layout(const Model& model, SpaceOrder space);

int shape_count(ElemShape shape, SpaceOrder space);
// Values of the element shape functions at a reference point (P0: the
// constant 1; P1Disc: corner-attached linear/bilinear functions).
void shape_values(ElemShape shape, SpaceOrder space, const Vec2& ref, double out[4]);

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  DofLayout layout;
};

// Galerkin assembly of the block system: single-layer rows for electrodes
// (prescribed and floating), flux-continuity rows (K' + lambda M) for
// dielectric interfaces, plus charge-neutrality constraints tying each
// floating group to its auxiliary potential.
LinearSystem assemble_system(const Model& model, const InterfaceLinks& links,
                             const AssemblyOptions& opt = {});

}  // namespace ebem

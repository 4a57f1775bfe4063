#pragma once

#include "ebem/operators.hpp"

namespace ebem {

struct SolveReport {
  int n = 0;
  double residual_rel = 0;
  double rcond = 0;
  bool ill_conditioned = false;  // rcond below the warning threshold
};

struct Solution {
  Eigen::VectorXd sigma;      // surface dofs in layout order
  std::vector<double> alpha;  // floating potentials in constraint-row order
  DofLayout layout;
  SolveReport report;
};

// Dense LU with a reciprocal-condition estimate and a residual check.
// Throws Error(Solver) on non-finite input, numerical singularity, or an
// unexplained large residual.
Solution solve_system(const LinearSystem& sys);

}  // namespace ebem

#include "ebem/solver.hpp"

#include <cmath>
#include <cstdio>

namespace ebem {

Solution solve_system(const LinearSystem& sys) {
  if (!sys.A.allFinite() || !sys.b.allFinite())
    throw Error(ErrorStage::Solver, "assembled system contains non-finite entries");
  if (sys.A.rows() == 0)
    throw Error(ErrorStage::Solver, "assembled system is empty");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
  double rc = lu.rcond();
  if (!std::isfinite(rc) || rc < 1e-15) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "matrix is numerically singular (rcond %.3e)", rc);
    throw Error(ErrorStage::Solver, buf);
  }

  Solution s;
  s.layout = sys.layout;
  Eigen::VectorXd x = lu.solve(sys.b);
  double bn = sys.b.norm();
  double rn = (sys.A * x - sys.b).norm();

  s.report.n = (int)sys.A.rows();
  s.report.residual_rel = bn > 0 ? rn / bn : rn;
  s.report.rcond = rc;
  s.report.ill_conditioned = rc < 1e-12;
  if (s.report.residual_rel > 1e-10) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "solve residual %.3e exceeds 1e-10",
                  s.report.residual_rel);
    throw Error(ErrorStage::Solver, buf);
  }

  s.sigma = x.head(sys.layout.n_sigma);
  s.alpha.assign(sys.layout.n_total - sys.layout.n_sigma, 0.0);
  for (int g = 0; g < (int)sys.layout.constraint_of_group.size(); ++g) {
    int row = sys.layout.constraint_of_group[g];
    if (row >= 0) s.alpha[row - sys.layout.n_sigma] = x(row);
  }
  return s;
}

}  // namespace ebem

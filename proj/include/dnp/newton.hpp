#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dnp/spatial.hpp"

namespace dnp {

/// Per-node scalar part of a residual, value and (semismooth) derivative.
struct LocalTerm {
  double value = 0.0;
  double slope = 0.0;
};

/// System  grad Phi_h(x) + M s(x) = 0  on the free dofs, with s acting nodewise.
/// Dirichlet nodes stay at their initial value.
struct NodalSystem {
  const EllipticOperator* op = nullptr;
  std::function<LocalTerm(std::size_t node, double x)> local;
};

struct InnerResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
  int degenerate_cells = 0;
};

struct InnerOptions {
  double tol = 1e-9;
  int max_iter = 50;
};

/// Residual vector on all nodes (zero at Dirichlet nodes).
Eigen::VectorXd system_residual(const NodalSystem& sys, const Eigen::VectorXd& x);
/// sqrt(sum R_j^2 / m_j): the H norm of M^-1 R.
double residual_norm(const EllipticOperator& op, const Eigen::VectorXd& r);

/// Semismooth Newton with Armijo backtracking on the residual norm.
/// Throws NewtonDivergence after max_iter or when the line search stalls
/// above tolerance and above rounding level.
InnerResult inner_solve(const NodalSystem& sys, const Eigen::VectorXd& x0,
                        const InnerOptions& opts);

}  // namespace dnp

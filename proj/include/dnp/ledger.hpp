#pragma once

#include <Eigen/Dense>

#include "dnp/model.hpp"

namespace dnp {

struct LedgerEntry {
  long i = 0;
  double t = 0.0;
  double phi = 0.0;
  double w_int = 0.0;
  /// phi + w_int (+inf if a node left the domain of W)
  double energy = 0.0;
  /// Phi + int beta_eps_hat + (eps - lambda)/2 |u|^2 + c_W |Omega|, dissipated by the scheme
  double energy_reg = 0.0;
  double dissipation = 0.0;
  double u_norm = 0.0;
  double du_norm = 0.0;
  double du_sup = 0.0;
  double bu_norm = 0.0;
  double beta_eps_norm = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double min_du = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  double step_lhs = 0.0;
  double step_rhs = 0.0;
  double step_margin = 0.0;
  bool step_pass = true;
  /// nodes where the resolvent of alpha landed on a jump
  int alpha_jump_nodes = 0;
  int substeps = 1;
};

/// Phi_h(u) + sum_j m_j W(u_j); +inf if any node is outside the domain of W.
double energy(const EllipticOperator& op, const Potential& pot, const Eigen::VectorXd& u);
double w_integral(const EllipticOperator& op, const Potential& pot, const Eigen::VectorXd& u);
double energy_reg(const EllipticOperator& op, const Potential& pot, double eps,
                  const Eigen::VectorXd& u);

struct StepCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  /// rhs + tol - lhs
  double margin = 0.0;
  bool pass = true;
};

/// Both sides of the one-step energy inequality of the scheme:
///   tau (alpha_nu(du), du) + dPhi + d int beta_eps_hat + eps/2 d|u|^2
///     <= (f, u_next - u_prev) + lambda/2 (|u_next|^2 - |u_next - u_prev|^2 - |u_prev|^2)
/// with tolerance 10 tol_newton max(1, largest single term).
StepCheck check_step_inequality(const Model& m, double eps, const Eigen::VectorXd& u_prev,
                                const Eigen::VectorXd& u_next, double dissipation,
                                const Eigen::VectorXd& f_i, double tol_newton);

}  // namespace dnp

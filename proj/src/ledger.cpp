#include "dnp/ledger.hpp"

#include <algorithm>
#include <cmath>

namespace dnp {

double w_integral(const EllipticOperator& op, const Potential& pot, const Eigen::VectorXd& u) {
  double s = 0.0;
  const auto& m = op.mass();
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double w = w_eval(pot, u[j]);
    if (std::isinf(w)) return kInf;
    s += m[j] * w;
  }
  return s;
}

double energy(const EllipticOperator& op, const Potential& pot, const Eigen::VectorXd& u) {
  const double w = w_integral(op, pot, u);
  if (std::isinf(w)) return kInf;
  return phi_energy(op, Field{u, 0.0}) + w;
}

double energy_reg(const EllipticOperator& op, const Potential& pot, double eps,
                  const Eigen::VectorXd& u) {
  double s = phi_energy(op, Field{u, 0.0});
  const auto& m = op.mass();
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    s += m[j] * (pot.beta.yosida_primitive(eps, u[j]) + 0.5 * (eps - pot.lambda) * u[j] * u[j] +
                 pot.c_w);
  }
  return s;
}

StepCheck check_step_inequality(const Model& md, double eps, const Eigen::VectorXd& u_prev,
                                const Eigen::VectorXd& u_next, double dissipation,
                                const Eigen::VectorXd& f_i, double tol_newton) {
  const EllipticOperator& op = md.op;
  const auto& m = op.mass();
  const double lambda = md.pot.lambda;
  const double dphi = phi_energy(op, Field{u_next, 0.0}) - phi_energy(op, Field{u_prev, 0.0});
  double dbeta = 0.0;
  double n_next = 0.0, n_prev = 0.0, n_diff = 0.0, fdu = 0.0;
  for (Eigen::Index j = 0; j < u_next.size(); ++j) {
    dbeta += m[j] * (md.pot.beta.yosida_primitive(eps, u_next[j]) -
                     md.pot.beta.yosida_primitive(eps, u_prev[j]));
    const double d = u_next[j] - u_prev[j];
    n_next += m[j] * u_next[j] * u_next[j];
    n_prev += m[j] * u_prev[j] * u_prev[j];
    n_diff += m[j] * d * d;
    fdu += m[j] * f_i[j] * d;
  }
  StepCheck c;
  const double eps_term = 0.5 * eps * (n_next - n_prev);
  const double lam_term = 0.5 * lambda * (n_next - n_diff - n_prev);
  c.lhs = dissipation + dphi + dbeta + eps_term;
  c.rhs = fdu + lam_term;
  const double scale = std::max({1.0, std::abs(dissipation), std::abs(dphi), std::abs(dbeta),
                                 std::abs(eps_term), std::abs(fdu), std::abs(lam_term)});
  c.tol = 10.0 * tol_newton * scale;
  c.margin = c.rhs + c.tol - c.lhs;
  c.pass = c.margin >= 0.0;
  return c;
}

}  // namespace dnp

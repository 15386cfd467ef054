#include "dnp/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "dnp/errors.hpp"

namespace dnp {

long SchemeConfig::steps() const {
  if (!(tau > 0.0) || !(T > 0.0)) throw DomainError("tau and T must be positive");
  const double r = T / tau;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * r) {
    throw DomainError("T / tau must be a positive integer");
  }
  return n;
}

void validate_scheme(const SchemeConfig& cfg, const MonotoneGraph& alpha) {
  cfg.steps();
  if (!(cfg.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const double nu = cfg.nu_eff();
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  if (nu > alpha.nu_bar() * (1.0 + 1e-12)) {
    throw DomainError("nu = " + std::to_string(nu) + " exceeds nu_bar = " +
                      std::to_string(alpha.nu_bar()) + " of the alpha graph");
  }
  if (!(cfg.tol_newton > 0.0) || cfg.max_newton < 1) {
    throw DomainError("inner solver tolerances must be positive");
  }
}

StepResult raw_step(const Eigen::VectorXd& u_prev, long i, double t, double tau,
                    const Eigen::VectorXd& f_i, const SchemeConfig& cfg, const Model& m) {
  const double eps = cfg.epsilon;
  const double nu = cfg.nu_eff();
  const double lambda = m.pot.lambda;
  const MonotoneGraph& alpha = m.alpha;
  const MonotoneGraph& beta = m.pot.beta;

  NodalSystem sys;
  sys.op = &m.op;
  sys.local = [&](std::size_t j, double x) {
    const auto k = static_cast<Eigen::Index>(j);
    const double s = (x - u_prev[k]) / tau;
    const YosidaValue a = alpha.yosida_with_slope(nu, s);
    const YosidaValue b = beta.yosida_with_slope(eps, x);
    LocalTerm lt;
    lt.value = a.value + b.value + eps * x - lambda * u_prev[k] - f_i[k];
    lt.slope = a.slope / tau + b.slope + eps;
    return lt;
  };
  const InnerResult ir = inner_solve(sys, u_prev, {cfg.tol_newton, cfg.max_newton});

  StepResult out;
  out.u = ir.x;
  LedgerEntry& e = out.entry;
  e.i = i;
  e.t = t;
  e.newton_iters = ir.iterations;
  e.residual = ir.residual;

  const EllipticOperator& op = m.op;
  const auto& mass = op.mass();
  const Eigen::VectorXd du = (out.u - u_prev) / tau;
  Eigen::VectorXd a(du.size()), b(du.size());
  int jumps = 0;
  for (Eigen::Index j = 0; j < du.size(); ++j) {
    a[j] = alpha.yosida(nu, du[j]);
    b[j] = beta.yosida(eps, out.u[j]);
    if (op.free()[static_cast<std::size_t>(j)] && alpha.resolvent_at_jump(nu, du[j])) ++jumps;
  }
  e.alpha_jump_nodes = jumps;
  e.dissipation = tau * (mass.array() * a.array() * du.array()).sum();
  e.phi = phi_energy(op, Field{out.u, t});
  e.w_int = w_integral(op, m.pot, out.u);
  e.energy = std::isinf(e.w_int) ? kInf : e.phi + e.w_int;
  e.energy_reg = energy_reg(op, m.pot, eps, out.u);
  e.u_norm = h_norm(op, out.u);
  e.du_norm = h_norm(op, du);
  e.du_sup = sup_norm(du);
  e.min_du = du.minCoeff();
  e.bu_norm = h_norm(op, apply_b(op, Field{out.u, t}).values);
  e.beta_eps_norm = h_norm(op, b);
  e.min_u = out.u.minCoeff();
  e.max_u = out.u.maxCoeff();
  const StepCheck c =
      check_step_inequality(m, eps, u_prev, out.u, e.dissipation, f_i, cfg.tol_newton);
  e.step_lhs = c.lhs;
  e.step_rhs = c.rhs;
  e.step_margin = c.margin;
  e.step_pass = c.pass;
  return out;
}

StepResult step(const Eigen::VectorXd& u_prev, long i, const SchemeConfig& cfg, const Model& m) {
  const double t = static_cast<double>(i) * cfg.tau;
  const Eigen::VectorXd f_i = cfg.forcing.at(t, m.op.grid().size());
  try {
    return raw_step(u_prev, i, t, cfg.tau, f_i, cfg, m);
  } catch (const NewtonDivergence&) {
    const double h = 0.5 * cfg.tau;
    StepResult a = raw_step(u_prev, i, t - h, h, f_i, cfg, m);
    StepResult b = raw_step(a.u, i, t, h, f_i, cfg, m);
    LedgerEntry& e = b.entry;
    e.dissipation += a.entry.dissipation;
    e.newton_iters += a.entry.newton_iters;
    e.residual = std::max(a.entry.residual, e.residual);
    e.step_lhs += a.entry.step_lhs;
    e.step_rhs += a.entry.step_rhs;
    e.step_margin += a.entry.step_margin;
    e.step_pass = e.step_pass && a.entry.step_pass;
    e.alpha_jump_nodes = std::max(e.alpha_jump_nodes, a.entry.alpha_jump_nodes);
    const Eigen::VectorXd du = (b.u - u_prev) / cfg.tau;
    e.du_norm = h_norm(m.op, du);
    e.du_sup = sup_norm(du);
    e.min_du = std::min(a.entry.min_du, e.min_du);
    e.substeps = 2;
    return b;
  }
}

Trajectory run(const Model& m, const SchemeConfig& cfg, const Eigen::VectorXd& u0,
               const RunOptions& opts) {
  validate_scheme(cfg, m.alpha);
  if (static_cast<std::size_t>(u0.size()) != m.op.grid().size()) {
    throw ShapeError("initial datum does not match the grid");
  }
  const long n = cfg.steps();
  const long every = std::max<long>(1, opts.store_every);
  Trajectory tr;
  tr.tau = cfg.tau;
  tr.indices.push_back(0);
  tr.states.push_back(u0);
  if (opts.on_store) opts.on_store(0, u0);
  tr.ledger.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXd u = u0;
  for (long i = 1; i <= n; ++i) {
    StepResult r;
    try {
      r = step(u, i, cfg, m);
    } catch (const NewtonDivergence& ex) {
      tr.aborted = true;
      tr.abort_reason = "step " + std::to_string(i) + ": " + ex.what();
      break;
    }
    u = std::move(r.u);
    tr.ledger.push_back(r.entry);
    if (i % every == 0 || i == n) {
      tr.indices.push_back(i);
      tr.states.push_back(u);
      if (opts.on_store) opts.on_store(i, u);
    }
  }
  if (tr.aborted && tr.indices.back() != static_cast<long>(tr.ledger.size())) {
    tr.indices.push_back(static_cast<long>(tr.ledger.size()));
    tr.states.push_back(u);
  }
  return tr;
}

namespace {

long ratio_of(double coarse, double fine) {
  const double r = coarse / fine;
  const long k = std::lround(r);
  if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * r) {
    throw DomainError("continuation ladder: time steps must divide each other");
  }
  return k;
}

}  // namespace

ContinuationReport continuation_study(const Model& m, const SchemeConfig& base,
                                      const Eigen::VectorXd& u0,
                                      const std::vector<Rung>& ladder) {
  if (ladder.empty()) throw DomainError("continuation ladder is empty");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (ladder[k].tau > ladder[k - 1].tau || ladder[k].epsilon > ladder[k - 1].epsilon ||
        ladder[k].nu > ladder[k - 1].nu) {
      throw DomainError("continuation ladder must be nonincreasing in tau, eps and nu");
    }
    ratio_of(ladder[k - 1].tau, ladder[k].tau);
  }
  const auto nr = static_cast<long>(ladder.size());
  std::vector<Trajectory> runs(ladder.size());
  std::vector<std::exception_ptr> errs(ladder.size());
#pragma omp parallel for schedule(dynamic)
  for (long r = 0; r < nr; ++r) {
    const auto ur = static_cast<std::size_t>(r);
    try {
      SchemeConfig c = base;
      c.tau = ladder[ur].tau;
      c.epsilon = ladder[ur].epsilon;
      c.nu = ladder[ur].nu;
      runs[ur] = run(m, c, u0);
    } catch (...) {
      errs[ur] = std::current_exception();
    }
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& tr : runs) {
    if (tr.aborted) throw NewtonDivergence("continuation rung aborted: " + tr.abort_reason, {}, {});
  }

  const EllipticOperator& op = m.op;
  ContinuationReport rep;
  rep.ladder = ladder;
  for (const auto& tr : runs) {
    rep.phi_final.push_back(phi_energy(op, Field{tr.final_state(), 0.0}));
    double lo = kInf, hi = -kInf;
    for (const auto& s : tr.states) {
      lo = std::min(lo, s.minCoeff());
      hi = std::max(hi, s.maxCoeff());
    }
    rep.min_u.push_back(lo);
    rep.max_u.push_back(hi);
  }
  const double tau0 = ladder.front().tau;
  const long n0 = std::lround(base.T / tau0);
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    const Trajectory& a = runs[r];
    const Trajectory& b = runs[r + 1];
    const long ka = ratio_of(tau0, a.tau);
    const long kb = ratio_of(tau0, b.tau);
    double linf = 0.0;
    for (long k = 0; k <= n0; ++k) {
      const auto ia = static_cast<std::size_t>(k * ka);
      const auto ib = static_cast<std::size_t>(k * kb);
      linf = std::max(linf, h_norm(op, a.states[ia] - b.states[ib]));
    }
    const long q = ratio_of(a.tau, b.tau);
    double c0 = 0.0;
    for (std::size_t i = 0; i < b.states.size(); ++i) {
      const long ic = static_cast<long>(i) / q;
      const double w = static_cast<double>(static_cast<long>(i) % q) / static_cast<double>(q);
      const auto uc = static_cast<std::size_t>(ic);
      Eigen::VectorXd interp = a.states[uc];
      if (w > 0.0) interp = (1.0 - w) * a.states[uc] + w * a.states[uc + 1];
      c0 = std::max(c0, h_norm(op, b.states[i] - interp));
    }
    rep.linf_h.push_back(linf);
    rep.c0_h.push_back(c0);
    rep.phi_final_diff.push_back(std::abs(rep.phi_final[r + 1] - rep.phi_final[r]));
  }
  rep.c0_monotone = true;
  rep.phi_converging = true;
  for (std::size_t k = 1; k < rep.c0_h.size(); ++k) {
    if (rep.c0_h[k] > rep.c0_h[k - 1]) rep.c0_monotone = false;
    if (rep.phi_final_diff[k] > rep.phi_final_diff[k - 1]) rep.phi_converging = false;
  }
  return rep;
}

}  // namespace dnp

#include "dnp/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "dnp/errors.hpp"
#include "dnp/ledger.hpp"

namespace dnp {

namespace {

double clamp_to(const Domain& d, double r) {
  return std::clamp(r, d.closure_lo(), d.closure_hi());
}

/// dist([a, b], [c, d]) for closed intervals
double interval_gap(double a, double b, double c, double d) {
  return std::max({0.0, c - b, a - d});
}

}  // namespace

double stationary_residual(const EllipticOperator& op, const Potential& pot,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& g,
                           ValueInterval target) {
  const Eigen::VectorXd bu = apply_b(op, Field{u, 0.0}).values;
  const Domain& d = pot.beta.domain();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (!op.free()[static_cast<std::size_t>(j)]) continue;
    const ValueInterval b = pot.beta.eval(clamp_to(d, u[j]));
    // g - Bu - W'(u) = x - beta(u) with x = g - Bu + lambda u
    const double x = g[j] - bu[j] + pot.lambda * u[j];
    r[j] = interval_gap(x - b.hi, x - b.lo, target.lo, target.hi);
  }
  return h_norm(op, r);
}

StationaryReport solve_stationary(const EllipticOperator& op, const Potential& pot,
                                  const Eigen::VectorXd& g, const std::vector<double>& eps_ladder,
                                  const Eigen::VectorXd& u_init, double tol, double tol_newton) {
  if (static_cast<std::size_t>(g.size()) != op.grid().size() ||
      static_cast<std::size_t>(u_init.size()) != op.grid().size()) {
    throw ShapeError("stationary data do not match the grid");
  }
  if (eps_ladder.empty()) throw DomainError("eps ladder is empty");
  for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
    if (!(eps_ladder[k] > 0.0) || (k > 0 && !(eps_ladder[k] < eps_ladder[k - 1]))) {
      throw DomainError("eps ladder must be positive and decreasing");
    }
  }
  StationaryReport rep;
  Eigen::VectorXd u = u_init;
  for (double eps : eps_ladder) {
    NodalSystem sys;
    sys.op = &op;
    sys.local = [&](std::size_t j, double x) {
      const auto k = static_cast<Eigen::Index>(j);
      const YosidaValue b = pot.beta.yosida_with_slope(eps, x);
      LocalTerm t;
      t.value = b.value + (eps - pot.lambda) * x - g[k];
      t.slope = b.slope + eps - pot.lambda;
      return t;
    };
    const InnerResult ir = inner_solve(sys, u, {tol_newton, 100});
    u = ir.x;
    rep.newton_iters += ir.iterations;
    rep.eps_path.push_back(eps);
    rep.residual_path.push_back(stationary_residual(op, pot, u, g));
  }
  rep.u = u;
  rep.residual = rep.residual_path.back();
  rep.min_u = u.minCoeff();
  rep.max_u = u.maxCoeff();
  if (!(rep.residual <= tol)) {
    throw NonconvergedLadder("stationary residual " + std::to_string(rep.residual) +
                             " above tolerance " + std::to_string(tol) + " at eps = " +
                             std::to_string(eps_ladder.back()));
  }
  return rep;
}

std::size_t tail_window(std::size_t n) {
  const std::size_t quarter = (n + 3) / 4;
  return std::min(n, std::max<std::size_t>(quarter, 50));
}

std::optional<OmegaReport> omega_limit_detect(const Trajectory& tr, const Model& m,
                                              const Forcing& f, double tol_rate, double tol_res) {
  const std::size_t n = tr.ledger.size();
  if (n == 0) return std::nullopt;
  const std::size_t w = tail_window(n);
  OmegaReport rep;
  for (std::size_t k = n - w; k < n; ++k) rep.tail_rate = std::max(rep.tail_rate, tr.ledger[k].du_sup);
  if (!(rep.tail_rate <= tol_rate)) return std::nullopt;

  const EllipticOperator& op = m.op;
  const auto size = op.grid().size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  if (f.kind == Forcing::Kind::Constant) g = f.field;
  if (f.kind == Forcing::Kind::Decaying || f.kind == Forcing::Kind::Tabulated) {
    double sup = 0.0;
    for (std::size_t k = n - w; k < n; ++k) {
      sup = std::max(sup, h_norm(op, f.at(tr.ledger[k].t, size)));
    }
    rep.f_tail = sup;
    rep.f_tail_ok = sup <= tol_res;
  }
  const ValueInterval a0 = m.alpha.eval(0.0);
  StationaryReport& s = rep.stationary;
  s.u = tr.final_state();
  s.weak_inclusion = !(a0.lo == 0.0 && a0.hi == 0.0);
  s.residual = stationary_residual(op, m.pot, s.u, g, s.weak_inclusion ? a0 : ValueInterval{0, 0});
  s.min_u = s.u.minCoeff();
  s.max_u = s.u.maxCoeff();
  rep.residual_ok = s.residual <= tol_res;
  return rep;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& d,
                   DecayFit::Mode mode) {
  if (t.size() != d.size()) throw ShapeError("decay series lengths differ");
  if (t.size() < 10) throw InsufficientData("decay fit needs at least 10 samples");
  const std::size_t n = t.size();
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(d[k] > 0.0)) throw DomainError("decay distances must be positive");
    if (k > 0 && !(t[k] > t[k - 1])) throw DomainError("decay times must increase");
    if (mode == DecayFit::Mode::Algebraic && !(t[k] > 0.0)) {
      throw DomainError("algebraic decay fit needs t > 0");
    }
    x[k] = mode == DecayFit::Mode::Algebraic ? std::log(t[k]) : t[k];
    y[k] = std::log(d[k]);
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("decay fit needs distinct times");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = y[k] - (icpt + slope * x[k]);
    ssr += e * e;
  }
  DecayFit fit;
  fit.mode = mode;
  fit.c = std::exp(icpt);
  fit.exponent = -slope;
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.samples = n;
  return fit;
}

DecaySeries decay_series(const Trajectory& tr, const EllipticOperator& op,
                         const Eigen::VectorXd& u_inf, double skip_frac, double floor_rel) {
  DecaySeries all;
  double dmax = 0.0;
  const double t_end = tr.time(tr.states.size() - 1);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const double t = tr.time(k);
    if (t <= 0.0 || t < skip_frac * t_end) continue;
    const double d = h_norm(op, tr.states[k] - u_inf);
    all.t.push_back(t);
    all.d.push_back(d);
    dmax = std::max(dmax, d);
  }
  DecaySeries out;
  for (std::size_t k = 0; k < all.t.size(); ++k) {
    if (all.d[k] > floor_rel * dmax) {
      out.t.push_back(all.t[k]);
      out.d.push_back(all.d[k]);
    }
  }
  return out;
}

LojProbe lojasiewicz_probe(const Trajectory& tr, const Eigen::VectorXd& u_inf, const Model& m,
                           const Eigen::VectorXd& g, const std::vector<double>& theta_grid) {
  const EllipticOperator& op = m.op;
  if (!op.isotropic_unit()) {
    throw PreconditionError("Lojasiewicz probe needs B = -Laplacian (linear, D = identity)");
  }
  if (theta_grid.empty()) throw DomainError("theta grid is empty");
  const Potential& pot = m.pot;
  const Domain& d = pot.beta.domain();
  const double e_inf = energy(op, pot, u_inf);
  const DualNorm dual(op.grid());

  LojProbe probe;
  probe.theta_grid = theta_grid;
  const std::size_t ns = tr.states.size();
  const std::size_t w = tail_window(ns);
  const double e_floor = 1e-13 * std::max(1.0, std::abs(e_inf));
  for (std::size_t k = ns - w; k < ns; ++k) {
    const Eigen::VectorXd& u = tr.states[k];
    const double e = energy(op, pot, u);
    const Eigen::VectorXd bu = apply_b(op, Field{u, 0.0}).values;
    Eigen::VectorXd r(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      r[j] = op.free()[static_cast<std::size_t>(j)]
                 ? bu[j] + pot.beta.minimal_section(clamp_to(d, u[j])) - pot.lambda * u[j] - g[j]
                 : 0.0;
    }
    const double res = dual(r);
    const Eigen::VectorXd dv = u - u_inf;
    const double vnorm = std::sqrt(grad_norm_sq(op, Field{dv, 0.0}) + h_inner(op, dv, dv));
    probe.neighborhood = std::max(probe.neighborhood, vnorm);
    const double de = std::abs(e - e_inf);
    if (!std::isfinite(de) || de <= e_floor || !(res > 1e-14)) continue;
    probe.samples.emplace_back(de, res);
  }

  for (double theta : theta_grid) {
    double mr = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [de, res] : probe.samples) {
      const double ratio = std::pow(de, 1.0 - theta) / res;
      mr = std::max(mr, ratio);
      const double x = std::log(res);
      const double y = std::log(ratio);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double cnt = static_cast<double>(probe.samples.size());
    double slope = 0.0;
    if (probe.samples.size() >= 3 && cnt * sxx - sx * sx > 0.0) {
      slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    // ratio ~ res^slope: bounded as res -> 0 iff slope >= 0
    const bool ok = slope >= -0.05;
    probe.max_ratio.push_back(mr);
    probe.slope.push_back(slope);
    probe.bounded.push_back(ok);
    if (ok && theta >= probe.theta) {
      probe.theta = theta;
      probe.c_l = mr;
    }
  }
  return probe;
}

}  // namespace dnp

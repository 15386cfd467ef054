#include "dnp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

BoundMaxima maxima(const std::vector<LedgerEntry>& ledger, std::size_t upto) {
  BoundMaxima b;
  for (std::size_t k = 0; k < upto && k < ledger.size(); ++k) {
    const auto& e = ledger[k];
    b.u = std::max(b.u, e.u_norm);
    b.du = std::max(b.du, e.du_norm);
    b.bu = std::max(b.bu, e.bu_norm);
    b.beta_eps = std::max(b.beta_eps, e.beta_eps_norm);
    b.energy = std::max(b.energy, std::isinf(e.energy) ? e.energy_reg : e.energy);
  }
  return b;
}

double rel_gap(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

}  // namespace

UniformBoundReport uniform_bound_monitor(const Trajectory& tr, Regime regime, double drift_tol) {
  UniformBoundReport rep;
  rep.regime = regime;
  rep.drift_tol = drift_tol;
  const std::size_t n = tr.ledger.size();
  rep.full = maxima(tr.ledger, n);
  rep.half = maxima(tr.ledger, n / 2);
  const auto& a = rep.full;
  const auto& b = rep.half;
  rep.drift = std::max({rel_gap(a.u, b.u), rel_gap(a.du, b.du), rel_gap(a.bu, b.bu),
                        rel_gap(a.beta_eps, b.beta_eps), rel_gap(a.energy, b.energy)});
  if (regime == Regime::Generic) {
    rep.note = "generic regime: bounds may grow linearly in T (c1 T + c)";
    rep.pass = true;
  } else {
    rep.asserted = true;
    rep.pass = rep.drift < drift_tol;
    rep.note = rep.pass ? "maxima over [0,T] and [0,T/2] agree" : "maxima still growing with T";
  }
  return rep;
}

double holder_constant(const Grid& g, const Eigen::VectorXd& u, double nu, double radius_frac) {
  const double radius =
      radius_frac * (g.dim == 1 ? g.length[0] : std::min(g.length[0], g.length[1]));
  const int ri = static_cast<int>(std::floor(radius / g.h(0) + 1e-9));
  const int rk = g.dim == 2 ? static_cast<int>(std::floor(radius / g.h(1) + 1e-9)) : 0;
  const int nx = g.n[0];
  const int ny = g.dim == 2 ? g.n[1] : 1;
  double best = 0.0;
  for (int k = 0; k < ny; ++k) {
    for (int i = 0; i < nx; ++i) {
      const double ua = u[static_cast<Eigen::Index>(g.index(i, k))];
      // each unordered pair once: later rows, or same row to the right
      for (int dk = 0; dk <= rk && k + dk < ny; ++dk) {
        for (int di = dk == 0 ? 1 : -ri; di <= ri; ++di) {
          const int i2 = i + di;
          if (i2 < 0 || i2 >= nx) continue;
          const double dx = di * g.h(0);
          const double dy = g.dim == 2 ? dk * g.h(1) : 0.0;
          const double d = std::sqrt(dx * dx + dy * dy);
          if (d > radius * (1.0 + 1e-12)) continue;
          const double ub = u[static_cast<Eigen::Index>(g.index(i2, k + dk))];
          best = std::max(best, std::abs(ua - ub) / std::pow(d, nu));
        }
      }
    }
  }
  return best;
}

SeparationReport separation_monitor(const Trajectory& tr, const Grid& g, const Potential& pot,
                                    double holder_nu) {
  if (!pot.has_singularity()) {
    throw MissingMetadata(pot.name + ": separation needs power-type barrier metadata");
  }
  SeparationReport rep;
  rep.compatible = validate_separation_compatibility(pot, holder_nu, g.dim);
  const Domain& d = pot.beta.domain();
  rep.upper = pot.upper_singularity.has_value() && d.bounded_above();
  rep.lower = pot.lower_singularity.has_value() && d.bounded_below();
  const double rbar = d.closure_hi();
  const double rlow = d.closure_lo();
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto& u = tr.states[k];
    if (rep.upper && rbar - u.maxCoeff() < rep.margin_upper) {
      rep.margin_upper = rbar - u.maxCoeff();
      if (rep.margin_upper < rep.min_margin) rep.worst_step = tr.indices[k];
    }
    if (rep.lower && u.minCoeff() - rlow < rep.margin_lower) {
      rep.margin_lower = u.minCoeff() - rlow;
      if (rep.margin_lower < rep.min_margin) rep.worst_step = tr.indices[k];
    }
    rep.min_margin = std::min(rep.margin_upper, rep.margin_lower);
  }
  // Holder constant on at most 64 evenly spread stored states
  const std::size_t ns = tr.states.size();
  const std::size_t stride = std::max<std::size_t>(1, ns / 64);
  for (std::size_t k = 0; k < ns; k += stride) {
    rep.holder_delta = std::max(rep.holder_delta, holder_constant(g, tr.states[k], holder_nu));
  }
  rep.holder_delta = std::max(rep.holder_delta, holder_constant(g, tr.states.back(), holder_nu));
  auto rho = [&](double gap) {
    if (rep.holder_delta <= 0.0) return kInf;
    return std::pow(rep.holder_delta, -1.0 / holder_nu) * std::pow(gap, 1.0 / holder_nu);
  };
  if (rep.upper) rep.rho_upper = rho(std::abs(rbar - pot.upper_singularity->onset));
  if (rep.lower) rep.rho_lower = rho(std::abs(pot.lower_singularity->onset - rlow));
  rep.pass = rep.min_margin > 0.0;
  return rep;
}

GronwallReport discrete_gronwall(const std::vector<Eigen::VectorXd>& v,
                                 const std::vector<Eigen::VectorXd>& z, double tau, double c,
                                 const Eigen::VectorXd& weights) {
  if (v.size() != z.size() || v.empty()) throw ShapeError("v and z need equal nonzero length");
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (weights.size() == 0) return a.dot(b);
    return (weights.array() * a.array() * b.array()).sum();
  };
  auto norm = [&](const Eigen::VectorXd& a) { return std::sqrt(std::max(0.0, dot(a, a))); };
  GronwallReport rep;
  double sum = 0.0;
  for (std::size_t m = 0; m < v.size(); ++m) {
    if (m > 0) {
      sum += dot(z[m], v[m] - v[m - 1]);
      rep.z_variation += norm(z[m] - z[m - 1]);
    }
    const double lhs = dot(v[m], v[m]);
    const double rhs = c + c * sum;
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) {
      throw HypothesisViolated("Gronwall hypothesis fails at m = " + std::to_string(m), m);
    }
    rep.max_v = std::max(rep.max_v, std::sqrt(lhs));
  }
  (void)tau;  // cancels: tau (z, dv) = (z, v^i - v^(i-1)) and tau |dz| = |z^i - z^(i-1)|
  const double v0 = norm(v[0]);
  const double z0 = norm(z[0]);
  const double s = rep.z_variation;
  const double a = c * (1.0 + (z0 + s) * v0);
  const double b = c * (z0 + 2.0 * s);
  rep.c_prime = std::max(v0, 0.5 * (b + std::sqrt(b * b + 4.0 * a)));
  rep.pass = rep.max_v <= rep.c_prime * (1.0 + 1e-12);
  return rep;
}

DependenceReport continuous_dependence(const Model& m, const SchemeConfig& cfg,
                                       const Eigen::VectorXd& u0a, const Eigen::VectorXd& u0b) {
  if (m.op.kind() != EllipticOperator::Kind::Linear) {
    throw PreconditionError("continuous dependence needs a linear operator B");
  }
  const auto& fl = m.alpha.slope_floor();
  if (fl.flat_lo != 0.0 || fl.flat_hi != 0.0 || !(fl.sigma > 0.0)) {
    throw PreconditionError("continuous dependence needs alpha with S- = S+ = 0 and sigma > 0");
  }
  const Trajectory a = run(m, cfg, u0a);
  const Trajectory b = run(m, cfg, u0b);
  if (a.aborted || b.aborted) throw NewtonDivergence("dependence run aborted", {}, {});

  DependenceReport rep;
  const EllipticOperator& op = m.op;
  const Eigen::VectorXd phi = u0a - u0b;
  const double d0 = h_norm(op, phi);
  rep.identical = d0 == 0.0;

  double lo = kInf, hi = -kInf;
  for (const auto* tr : {&a, &b}) {
    for (const auto& s : tr->states) {
      lo = std::min(lo, s.minCoeff());
      hi = std::max(hi, s.maxCoeff());
    }
  }
  const double eps = cfg.epsilon;
  double lb = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double r = lo + (hi - lo) * k / 1000.0;
    lb = std::max(lb, m.pot.beta.yosida_slope(eps, r));
  }
  rep.lipschitz = lb + eps + m.pot.lambda;
  rep.sigma_eff = fl.sigma / (1.0 + 2.0 * cfg.nu_eff() * fl.sigma);
  const double bphi = rep.identical ? 0.0 : b_form(op, Field{phi, 0.0}, Field{phi, 0.0});
  const double pre =
      rep.identical ? 1.0 : std::sqrt(1.0 + bphi / (rep.lipschitz * d0 * d0));

  rep.pass = true;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const double t = a.time(k);
    const double diff = h_norm(op, a.states[k] - b.states[k]);
    const double ratio = rep.identical ? diff : diff / d0;
    const double env = pre * std::exp(rep.lipschitz * t / (2.0 * rep.sigma_eff));
    rep.times.push_back(t);
    rep.ratio.push_back(ratio);
    rep.envelope.push_back(env);
    rep.max_excess = std::max(rep.max_excess, ratio / env);
    if (ratio > env) rep.pass = false;
  }
  return rep;
}

}  // namespace dnp

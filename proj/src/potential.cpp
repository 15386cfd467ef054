#include "dnp/potential.hpp"

#include <algorithm>
#include <cmath>

#include "dnp/errors.hpp"

namespace dnp {

Potential Potential::double_well() {
  Potential p{"double_well", MonotoneGraph::power(3.0)};
  p.lambda = 1.0;
  p.c_w = 0.25;
  p.eta = 0.5;
  p.analytic_window = AnalyticWindow{-2.0, 2.0, 0.0};
  return p;
}

Potential Potential::quadratic() {
  Potential p{"quadratic", MonotoneGraph::identity()};
  p.eta = 1.0;
  p.analytic_window = AnalyticWindow{-1.0, 1.0, 0.0};
  return p;
}

Potential Potential::logarithmic() {
  Potential p{"logarithmic", MonotoneGraph::logarithmic()};
  p.eta = 1.0;
  return p;
}

Potential Potential::singular_power(double kappa, double c, double lambda) {
  Potential p{"singular_power", MonotoneGraph::singular_power(1.0, kappa, c)};
  p.lambda = lambda;
  p.eta = 0.5;
  // c((1-r)^-kappa - 1) >= (c/2)(1-r)^-kappa once (1-r)^-kappa >= 2.
  const double r1 = 1.0 - std::pow(2.0, -1.0 / kappa);
  p.upper_singularity = Singularity{kappa, 0.5 * c, r1};
  p.lower_singularity = Singularity{kappa, 0.5 * c, -r1};
  // W is at least as large as the primitive minus lambda r^2/2, itself >= 0 near 0.
  if (lambda > 0.0) {
    double shift = 0.0;
    for (int k = -999; k <= 999; ++k) {
      const double r = k / 1000.0;
      shift = std::max(shift, 0.5 * lambda * r * r - p.beta.primitive(r));
    }
    p.c_w = shift;
  }
  return p;
}

Potential Potential::half_line_obstacle(double rbar) {
  Potential p{"half_line_obstacle", MonotoneGraph::upper_obstacle(rbar)};
  p.eta = 1.0;
  return p;
}

double w_eval(const Potential& p, double r) {
  const double b = p.beta.primitive(r);
  if (std::isinf(b)) return kInf;
  return b - 0.5 * p.lambda * r * r + p.c_w;
}

ValueInterval w_prime(const Potential& p, double r) {
  if (!p.beta.domain().in_domain(r)) {
    throw DomainError(p.name + ": W' outside the domain of beta");
  }
  const ValueInterval v = p.beta.eval(r);
  return {v.lo - p.lambda * r, v.hi - p.lambda * r};
}

double w_prime0(const Potential& p, double r) {
  return p.beta.minimal_section(r) - p.lambda * r;
}

double w_eps_eval(const Potential& p, double eps, double r) {
  return p.beta.yosida_primitive(eps, r) - 0.5 * p.lambda * r * r + p.c_w;
}

std::vector<double> barrier_samples(const MonotoneGraph& g, std::size_t n, double span) {
  const Domain& d = g.domain();
  std::vector<double> out;
  out.reserve(n + 2);
  const std::size_t half = std::max<std::size_t>(n / 2, 2);
  auto side = [&](bool upper) {
    const bool bounded = upper ? d.bounded_above() : d.bounded_below();
    const double dir = upper ? 1.0 : -1.0;
    if (bounded) {
      const double b = upper ? d.closure_hi() : d.closure_lo();
      // log-spaced gaps from |b| down to 1e-12 |b|
      for (std::size_t k = 0; k < half; ++k) {
        const double e = -12.0 * static_cast<double>(k) / static_cast<double>(half - 1);
        out.push_back(b - dir * std::abs(b) * std::pow(10.0, e));
      }
      if ((upper ? d.hi.kind : d.lo.kind) == EndKind::Closed) out.push_back(b);
    } else {
      for (std::size_t k = 1; k <= half; ++k) {
        out.push_back(dir * span * static_cast<double>(k) / static_cast<double>(half));
      }
    }
  };
  side(false);
  side(true);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CoercivityReport validate_coercivity(const Potential& p, std::size_t n_samples,
                                     const std::vector<double>& eps_values) {
  CoercivityReport rep;
  const MonotoneGraph& g = p.beta;
  const Domain& d = g.domain();
  constexpr double span = 10.0;
  const auto samples = barrier_samples(g, n_samples, span);

  const bool unbounded = !d.bounded_above() || !d.bounded_below();
  const auto& fl = g.slope_floor();
  rep.radius = std::max({2.0 * fl.flat_hi, 2.0 * std::abs(fl.flat_lo), 1.0});
  bool any_large = false;
  for (double r : samples) {
    if (!d.in_domain(r) || std::abs(r) < rep.radius) continue;
    const bool lower_side_unbounded = r < 0 && !d.bounded_below();
    const bool upper_side_unbounded = r > 0 && !d.bounded_above();
    if (!lower_side_unbounded && !upper_side_unbounded) continue;
    any_large = true;
    const ValueInterval wp = w_prime(p, r);
    const double sel = r > 0 ? wp.lo : wp.hi;
    rep.growth_margin = std::min(rep.growth_margin, sel * r - p.eta * r * r);
  }
  rep.growth_vacuous = !any_large;
  if (!unbounded) rep.notes.push_back("bounded domain: large-|r| growth holds vacuously");
  const bool growth_ok = rep.growth_vacuous || rep.growth_margin >= 0.0;

  // W - eta r^2/2 must be bounded below; report the c_W shift it needs.
  // Bounded below on an unbounded side means the edge samples do not undercut
  // the interior minimum.
  auto below_ok = [&](double min_all, double min_inner) {
    return min_all >= min_inner - 1e-9 * (1.0 + std::abs(min_inner));
  };
  double min_gap = kInf;
  double min_inner = kInf;
  for (double r : samples) {
    const double w = w_eval(p, r);
    if (std::isinf(w)) continue;
    const double gap = w - 0.5 * p.eta * r * r;
    min_gap = std::min(min_gap, gap);
    if (std::abs(r) < 0.9 * span) min_inner = std::min(min_inner, gap);
  }
  rep.energy_shift = std::max(0.0, -min_gap);
  rep.energy_bound_holds = !unbounded || below_ok(min_gap, min_inner);

  bool reg_ok = true;
  for (double eps : eps_values) {
    double reg_min = kInf;
    double reg_inner = kInf;
    for (int k = -400; k <= 400; ++k) {
      const double r = span * k / 400.0;
      const double gap = w_eps_eval(p, eps, r) - 0.25 * p.eta * r * r;
      reg_min = std::min(reg_min, gap);
      if (std::abs(r) < 0.9 * span) reg_inner = std::min(reg_inner, gap);
    }
    rep.reg_energy_shift = std::max(rep.reg_energy_shift, -reg_min);
    if (!below_ok(reg_min, reg_inner)) reg_ok = false;
  }
  if (!reg_ok) rep.notes.push_back("regularized potential not bounded below by eta r^2/4");
  if (rep.energy_shift > 0.0) rep.notes.push_back("lower bound holds after shifting c_W");

  rep.pass = growth_ok && rep.energy_bound_holds && reg_ok;
  return rep;
}

bool validate_separation_compatibility(const Potential& p, double holder_nu, int dim) {
  if (!p.has_singularity()) {
    throw MissingMetadata(p.name + ": no power-type barrier singularity declared");
  }
  bool ok = true;
  for (const auto& s : {p.upper_singularity, p.lower_singularity}) {
    if (s) ok = ok && (2.0 * s->kappa * holder_nu >= static_cast<double>(dim));
  }
  return ok;
}

}  // namespace dnp

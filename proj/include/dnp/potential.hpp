#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnp/monotone_graph.hpp"

namespace dnp {

/// Power-type blow-up of the minimal section near one barrier:
/// |beta0(r)| >= c / |barrier - r|^kappa for r between the point `onset` and the barrier.
struct Singularity {
  double kappa = 0.0;
  double c = 0.0;
  double onset = 0.0;
};

struct QGrowth {
  double eta1 = 0.0;
  double q = 0.0;
};

/// Window (lo, hi) on which W is analytic, with sign margin M outside it.
struct AnalyticWindow {
  double lo = 0.0;
  double hi = 0.0;
  double margin = 0.0;
};

/// lambda-convex potential W(r) = primitive of beta - lambda r^2 / 2 + c_W.
struct Potential {
  std::string name;
  MonotoneGraph beta;
  double lambda = 0.0;
  double c_w = 0.0;
  double eta = 0.0;
  std::optional<Singularity> upper_singularity;
  std::optional<Singularity> lower_singularity;
  std::optional<QGrowth> q_growth;
  std::optional<AnalyticWindow> analytic_window;

  static Potential double_well();
  static Potential quadratic();
  static Potential logarithmic();
  /// beta0 = c sign(r) ((1 - |r|)^(-kappa) - 1) on (-1, 1).
  static Potential singular_power(double kappa, double c = 1.0, double lambda = 0.0);
  /// beta = r + vertical ray at rbar (obstacle from above).
  static Potential half_line_obstacle(double rbar = 1.0);

  bool has_singularity() const { return upper_singularity || lower_singularity; }
};

/// +inf outside the effective domain of the primitive.
double w_eval(const Potential& p, double r);
/// beta(r) - lambda r as an interval.
ValueInterval w_prime(const Potential& p, double r);
/// Minimal-section selection of W'.
double w_prime0(const Potential& p, double r);
/// Yosida-regularized potential W_eps = beta_eps_hat - lambda r^2/2 + c_W.
double w_eps_eval(const Potential& p, double eps, double r);

struct CoercivityReport {
  bool pass = false;
  /// min over sampled |r| >= radius of W'(r) r - eta r^2
  double growth_margin = kInf;
  bool growth_vacuous = false;
  double radius = 0.0;
  /// Shift of c_W needed for W >= eta r^2 / 2 on the samples (0 if none).
  double energy_shift = 0.0;
  /// Same for W_eps >= eta r^2 / 4, max over the checked eps values.
  double reg_energy_shift = 0.0;
  bool energy_bound_holds = false;
  std::vector<std::string> notes;
};

/// Samples the growth inequality W'(r) r >= eta r^2 at large |r| and the
/// lower bound W >= eta r^2/2 (up to an additive shift of c_W), plus the
/// regularized bound W_eps >= eta r^2/4 at the given eps values.
CoercivityReport validate_coercivity(const Potential& p, std::size_t n_samples,
                                     const std::vector<double>& eps_values = {1e-2, 1e-4});

/// 2 kappa holder_nu >= dim on every declared barrier.
bool validate_separation_compatibility(const Potential& p, double holder_nu, int dim);

/// Sample points on the closure of the domain of beta clustered at barriers
/// (log-spaced), or on [-span, span] when unbounded.
std::vector<double> barrier_samples(const MonotoneGraph& g, std::size_t n, double span = 10.0);

}  // namespace dnp

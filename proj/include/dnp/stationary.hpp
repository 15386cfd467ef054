#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnp/model.hpp"
#include "dnp/stepper.hpp"

namespace dnp {

struct StationaryReport {
  Eigen::VectorXd u;
  /// H norm of the nodal distance of g - Bu + lambda u to beta(u) (or, for the
  /// weak inclusion, of g - Bu - W'(u) to alpha(0))
  double residual = 0.0;
  std::vector<double> eps_path;
  std::vector<double> residual_path;
  int newton_iters = 0;
  bool weak_inclusion = false;
  double min_u = 0.0;
  double max_u = 0.0;
};

/// Nodal-interval residual of  0 ∈ Bu + W'(u) - g  (target {0}) or of
/// g - Bu - W'(u) ∈ target.
double stationary_residual(const EllipticOperator& op, const Potential& pot,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& g,
                           ValueInterval target = {0.0, 0.0});

/// Solves  B v + beta_eps(v) + eps v - lambda v = g  for each eps of the ladder
/// (warm started from the previous rung, the first from u_init), then reports
/// the unregularized residual. Throws NonconvergedLadder if it stays above tol.
StationaryReport solve_stationary(const EllipticOperator& op, const Potential& pot,
                                  const Eigen::VectorXd& g, const std::vector<double>& eps_ladder,
                                  const Eigen::VectorXd& u_init, double tol = 1e-6,
                                  double tol_newton = 1e-10);

/// Tail window of a ledger of n entries: max(ceil(n/4), 50), capped at n.
std::size_t tail_window(std::size_t n);

struct OmegaReport {
  StationaryReport stationary;
  double tail_rate = 0.0;
  bool residual_ok = false;
  /// under decaying forcing: sup over the tail of |f|_H
  std::optional<double> f_tail;
  bool f_tail_ok = true;
};

/// Empty when the sup over the tail window of |du/dt| (nodal sup) exceeds
/// tol_rate. Limit forcing g is the constant field, or 0 for decaying and
/// tabulated forcing (whose tail must then fall below tol_res).
std::optional<OmegaReport> omega_limit_detect(const Trajectory& tr, const Model& m,
                                              const Forcing& f, double tol_rate, double tol_res);

struct DecayFit {
  enum class Mode { Algebraic, Exponential };
  Mode mode = Mode::Algebraic;
  double c = 0.0;
  /// mu (algebraic) or rate (exponential)
  double exponent = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least squares on log d vs log t (algebraic) or log d vs t (exponential).
/// Throws InsufficientData below 10 samples, DomainError on d <= 0 or t not
/// increasing.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& d,
                   DecayFit::Mode mode);

struct LojProbe {
  double theta = 0.0;
  double c_l = 0.0;
  std::vector<double> theta_grid;
  std::vector<double> max_ratio;
  std::vector<double> slope;
  std::vector<bool> bounded;
  /// (|E - E_inf|, V*-residual) per tail sample
  std::vector<std::pair<double, double>> samples;
  /// largest ||v - u_inf||_V over the samples
  double neighborhood = 0.0;
};

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> d;
};

/// ||u(t) - u_inf||_H over stored states with t >= skip_frac * t_end, dropping
/// distances below floor_rel * (largest distance).
DecaySeries decay_series(const Trajectory& tr, const EllipticOperator& op,
                         const Eigen::VectorXd& u_inf, double skip_frac = 0.1,
                         double floor_rel = 1e-9);

/// Ratio |E(u) - E(u_inf)|^(1-theta) / ||Bu + W'(u) - g||_V* along the tail.
/// A theta counts as bounded when log ratio does not decrease against log
/// residual faster than slope -0.05; the largest bounded theta is reported.
/// Throws PreconditionError unless B is the unit Laplacian.
LojProbe lojasiewicz_probe(const Trajectory& tr, const Eigen::VectorXd& u_inf, const Model& m,
                           const Eigen::VectorXd& g, const std::vector<double>& theta_grid);

}  // namespace dnp

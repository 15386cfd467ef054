#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dnp/ledger.hpp"
#include "dnp/model.hpp"
#include "dnp/newton.hpp"

namespace dnp {

struct SchemeConfig {
  double tau = 1e-3;
  double T = 1.0;
  double epsilon = 1e-6;
  /// <= 0 means "same as epsilon"
  double nu = 0.0;
  double tol_newton = 1e-9;
  int max_newton = 50;
  Forcing forcing;

  double nu_eff() const { return nu > 0.0 ? nu : epsilon; }
  /// N = T / tau; throws DomainError unless it is a positive integer.
  long steps() const;
};

/// Throws DomainError on tau, T, eps, nu out of range or nu above nu_bar of alpha.
void validate_scheme(const SchemeConfig& cfg, const MonotoneGraph& alpha);

struct StepResult {
  Eigen::VectorXd u;
  LedgerEntry entry;
};

/// One step of
///   alpha_nu((u - u_prev)/tau) + B u + beta_eps(u) + eps u = lambda u_prev + f(i tau).
/// On NewtonDivergence the step is retried once as two half steps with the
/// same f^i; a second failure propagates.
StepResult step(const Eigen::VectorXd& u_prev, long i, const SchemeConfig& cfg, const Model& m);

/// Same with explicit tau and forcing values (no retry).
StepResult raw_step(const Eigen::VectorXd& u_prev, long i, double t, double tau,
                    const Eigen::VectorXd& f_i, const SchemeConfig& cfg, const Model& m);

struct Trajectory {
  /// stored states and their step indices (index 0 always stored)
  std::vector<long> indices;
  std::vector<Eigen::VectorXd> states;
  /// entries for i = 1..N (fewer when aborted)
  std::vector<LedgerEntry> ledger;
  double tau = 0.0;
  std::string fingerprint;
  bool aborted = false;
  std::string abort_reason;

  double time(std::size_t k) const { return static_cast<double>(indices[k]) * tau; }
  const Eigen::VectorXd& final_state() const { return states.back(); }
};

struct RunOptions {
  /// keep every k-th state (the last state is always kept)
  long store_every = 1;
  /// called on each stored state
  std::function<void(long i, const Eigen::VectorXd& u)> on_store;
};

/// Iterates the scheme from u0 for N steps. Unrecoverable NewtonDivergence
/// ends the run with aborted = true and the partial trajectory.
Trajectory run(const Model& m, const SchemeConfig& cfg, const Eigen::VectorXd& u0,
               const RunOptions& opts = {});

struct Rung {
  double tau = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
};

struct ContinuationReport {
  std::vector<Rung> ladder;
  /// successive differences between rungs k and k+1 (size ladder - 1)
  std::vector<double> linf_h;
  std::vector<double> c0_h;
  std::vector<double> phi_final;
  std::vector<double> phi_final_diff;
  std::vector<double> min_u;
  std::vector<double> max_u;
  bool c0_monotone = false;
  bool phi_converging = false;
};

/// Runs every rung (concurrently) and compares successive ones: L-inf(0,T;H)
/// on the coarse output grid of the first rung and C0([0,T];H) between the
/// piecewise-linear interpolants on the finer grid of each pair.
ContinuationReport continuation_study(const Model& m, const SchemeConfig& base,
                                      const Eigen::VectorXd& u0, const std::vector<Rung>& ladder);

}  // namespace dnp

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnp/ledger.hpp"
#include "dnp/stepper.hpp"

namespace dnp {

enum class Regime { S0_f1, F2, Generic };

struct BoundMaxima {
  double u = 0.0;
  double du = 0.0;
  double bu = 0.0;
  double beta_eps = 0.0;
  double energy = 0.0;
};

struct UniformBoundReport {
  Regime regime = Regime::Generic;
  BoundMaxima full;
  BoundMaxima half;
  /// largest relative difference between the [0,T] and [0,T/2] maxima
  double drift = 0.0;
  double drift_tol = 1e-3;
  bool asserted = false;
  bool pass = true;
  std::string note;
};

/// Running maxima of |u|, |du|, |Bu|, |beta_eps(u)| and E over the ledger.
/// In the S0+f1 and f2 regimes the maxima over [0,T] and [0,T/2] must agree to
/// drift_tol (relative); the generic regime only reports.
UniformBoundReport uniform_bound_monitor(const Trajectory& tr, Regime regime,
                                         double drift_tol = 1e-3);

struct SeparationReport {
  bool upper = false;
  bool lower = false;
  /// rbar - max u and min u - rlow, minimized over all stored states
  double margin_upper = kInf;
  double margin_lower = kInf;
  double min_margin = kInf;
  long worst_step = 0;
  /// discrete Holder constant max |u(x1)-u(x2)| / |x1-x2|^nu
  double holder_delta = 0.0;
  /// delta^(-1/nu) |r1 - rbar|^(1/nu) with r1 the singularity onset
  double rho_upper = 0.0;
  double rho_lower = 0.0;
  bool compatible = false;
  bool pass = false;
};

/// Holder quotient over node pairs closer than radius_frac times the shortest
/// side of the domain.
double holder_constant(const Grid& g, const Eigen::VectorXd& u, double nu,
                       double radius_frac = 0.25);

/// Throws MissingMetadata when the potential declares no singularity.
SeparationReport separation_monitor(const Trajectory& tr, const Grid& g, const Potential& pot,
                                    double holder_nu);

struct GronwallReport {
  double c_prime = 0.0;
  double max_v = 0.0;
  /// sum_i tau |dz^i|
  double z_variation = 0.0;
  bool pass = false;
};

/// Checks |v^m|^2 <= c + c tau sum_{i<=m} (z^i, dv^i) for m = 0..M, then bounds
/// max |v^m| by c' from Abel summation:
///   K^2 <= A + B K,  A = c (1 + (|z0| + S)|v0|),  B = c (|z0| + 2S),
///   c' = max(|v0|, (B + sqrt(B^2 + 4A)) / 2),  S = sum tau |dz^i|.
/// Inner products use `weights` (Euclidean when empty).
/// Throws HypothesisViolated with the first failing m.
GronwallReport discrete_gronwall(const std::vector<Eigen::VectorXd>& v,
                                 const std::vector<Eigen::VectorXd>& z, double tau, double c,
                                 const Eigen::VectorXd& weights = {});

struct DependenceReport {
  std::vector<double> times;
  /// |u1(t) - u2(t)|_H / |u1(0) - u2(0)|_H
  std::vector<double> ratio;
  std::vector<double> envelope;
  double lipschitz = 0.0;
  double sigma_eff = 0.0;
  double max_excess = 0.0;
  bool identical = false;
  bool pass = false;
};

/// Runs both initial data and compares with the envelope
///   sqrt(1 + (B phi, phi) / (L |phi|^2)) exp(L t / (2 sigma_eff)),
/// phi = u1(0) - u2(0), L = sup beta_eps' on the observed range + eps + lambda,
/// sigma_eff = sigma / (1 + 2 nu sigma).
/// Throws PreconditionError unless B is linear and alpha satisfies S0.
DependenceReport continuous_dependence(const Model& m, const SchemeConfig& cfg,
                                       const Eigen::VectorXd& u0a, const Eigen::VectorXd& u0b);

}  // namespace dnp

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnp/diagnostics.hpp"
#include "dnp/model.hpp"
#include "dnp/stationary.hpp"
#include "dnp/stepper.hpp"

namespace dnp {

/// Safe catalog of nodal profiles used for initial data and forcing fields.
struct Profile {
  enum class Family { Constant, Polynomial, Sine, Gaussian, File };
  Family family = Family::Constant;
  double value = 0.0;
  double amplitude = 1.0;
  std::vector<double> coeffs;
  std::vector<double> coeffs_y;
  int mode = 1;
  double phase = 0.0;
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.1;
  double offset = 0.0;
  std::string path;

  Eigen::VectorXd sample_on(const Grid& g) const;
};

struct DiagnosticsSpec {
  bool energy_check = true;
  bool uniform_bounds = true;
  std::optional<Regime> regime;  // derived from alpha and forcing when unset
  double drift_tol = 1e-3;
  bool separation = false;
  double holder_nu = 0.5;
  bool omega_limit = true;
  double tol_rate = 1e-8;
  double tol_res = 1e-4;
  bool decay = false;
  DecayFit::Mode decay_mode = DecayFit::Mode::Exponential;
  bool lojasiewicz = false;
  std::vector<double> theta_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
  /// exponent of the embedding H into L^chi used by the growth constraint
  double chi = 1.0;
};

struct OutputSpec {
  std::string dir = "out";
  long checkpoint_every = 0;  // 0: only the first and last states
};

struct Scenario {
  Model model;
  SchemeConfig scheme;
  Eigen::VectorXd u0;
  Profile initial;
  /// boundary nodes of u0 zeroed to match Dirichlet data
  int projected_boundary_nodes = 0;
  double xi = 0.1;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  std::vector<Rung> ladder;
  std::vector<double> depend_deltas{1e-2, 1e-3, 1e-4};
  Profile depend_perturbation;
  std::vector<double> stationary_ladder{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  double stationary_tol = 1e-6;
  /// concatenated config text and referenced file contents
  std::string canonical;
  std::string fingerprint;
};

/// Parses TOML text. Relative paths resolve against base_dir. Throws
/// ParseError (with key and line) or ValidationError (with hypothesis tag).
Scenario parse_config(const std::string& text, const std::string& base_dir = ".");
Scenario load_config(const std::string& path);

struct CheckItem {
  std::string tag;
  /// "pass", "fail", "n/a" or "warn"
  std::string status;
  bool hard = true;
  std::string evidence;
};

struct ValidationReport {
  std::vector<CheckItem> items;
  bool ok() const;
  const CheckItem* find(const std::string& tag) const;
};

ValidationReport validate_scenario(const Scenario& s);

std::string sha256_hex(const std::string& data);

}  // namespace dnp

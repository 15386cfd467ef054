#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dnp/monotone_graph.hpp"
#include "dnp/potential.hpp"
#include "dnp/spatial.hpp"

namespace dnp {

/// The three constitutive pieces of  alpha(u_t) + B u + W'(u) ∋ f.
struct Model {
  EllipticOperator op;
  Potential pot;
  MonotoneGraph alpha;
};

struct Forcing {
  enum class Kind { Zero, Constant, Decaying, Tabulated };
  Kind kind = Kind::Zero;
  /// Constant field, or g in f = g exp(-rate t).
  Eigen::VectorXd field;
  double rate = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> table;

  static Forcing zero() { return {}; }
  static Forcing constant(Eigen::VectorXd f);
  static Forcing decaying(Eigen::VectorXd g, double rate);
  static Forcing tabulated(std::vector<double> times, std::vector<Eigen::VectorXd> values);
  /// Tabulates f(x, y, t) at t = i tau, i = 0..n_steps.
  template <class F>
  static Forcing sample_times(const Grid& g, F&& f, double tau, long n_steps) {
    std::vector<double> ts;
    std::vector<Eigen::VectorXd> vs;
    ts.reserve(static_cast<std::size_t>(n_steps + 1));
    vs.reserve(static_cast<std::size_t>(n_steps + 1));
    for (long i = 0; i <= n_steps; ++i) {
      const double t = static_cast<double>(i) * tau;
      ts.push_back(t);
      vs.push_back(sample(g, [&](double x, double y) { return f(x, y, t); }).values);
    }
    return tabulated(std::move(ts), std::move(vs));
  }

  /// Nodal values at time t. Tabulated forcing must carry t exactly (relative
  /// 1e-12); there is no interpolation.
  Eigen::VectorXd at(double t, std::size_t n) const;
  struct Tail {
    /// sup over sampled t of t^(1+xi) int_t^inf |f|_H^2 (table truncated at its end)
    double sup_value = 0.0;
    /// fitted a in |f(t)|^2 ~ t^-a over the second half of a table
    double exponent = 0.0;
    bool bounded = true;
  };
  /// Integrability check t^(1+xi) int_t^inf |f|^2 <= c. Closed form for the
  /// exponential family; tables are judged by the fitted power-law exponent
  /// (bounded iff a >= 2 + xi).
  Tail tail(const EllipticOperator& op, double xi) const;
};

}  // namespace dnp

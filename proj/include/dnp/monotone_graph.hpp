#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dnp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed value interval [lo, hi]; lo or hi may be infinite.
struct ValueInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool singleton() const { return lo == hi; }
  /// Distance from v to the interval (0 inside).
  double distance(double v) const {
    if (v < lo) return lo - v;
    if (v > hi) return v - hi;
    return 0.0;
  }
};

enum class EndKind { Open, Closed, Infinite };

struct Endpoint {
  double value = 0.0;
  EndKind kind = EndKind::Infinite;
};

/// Domain of a graph on the real line: [lo, hi] with open/closed/infinite ends.
struct Domain {
  Endpoint lo{-kInf, EndKind::Infinite};
  Endpoint hi{kInf, EndKind::Infinite};

  bool in_closure(double r) const;
  bool in_domain(double r) const;
  double closure_lo() const { return lo.value; }
  double closure_hi() const { return hi.value; }
  bool bounded_below() const { return lo.kind != EndKind::Infinite; }
  bool bounded_above() const { return hi.kind != EndKind::Infinite; }
};

using ScalarFn = std::function<double(double)>;

/// A monotone, continuous branch of the graph on [lo, hi]. `slope` may return
/// +inf near barriers. `antiderivative`, when set, is any primitive of `value`
/// on the piece and replaces quadrature in `primitive`.
struct Piece {
  double lo = -kInf;
  double hi = kInf;
  ScalarFn value;
  ScalarFn slope;
  ScalarFn antiderivative;
};

/// Multivalued point: graph(at) = values. Vertical rays at closed domain ends
/// are jumps with an infinite side.
struct Jump {
  double at = 0.0;
  ValueInterval values;
};

/// Slope floor: derivative >= 2 sigma outside the flat window [flat_lo, flat_hi].
struct SlopeFloor {
  double sigma = 0.0;
  double flat_lo = 0.0;
  double flat_hi = 0.0;
};

/// Two-sided power bounds sigma|r| + kappa_inf |r|^p_inf <= |g(r)| <= sigma_prime |r| + ell_inf |r|^q_inf.
struct GrowthBounds {
  double sigma_prime = 0.0;
  double kappa_inf = 0.0;
  double ell_inf = 0.0;
  double p_inf = 1.0;
  double q_inf = 1.0;
};

struct YosidaValue {
  double value = 0.0;
  double slope = 0.0;
};

struct CertificateReport {
  double min_slope = kInf;
  bool pass = false;
  std::string note;
};

/// Maximal monotone graph on the real line, immutable after construction.
///
/// Exact calculus (evaluation, minimal section, primitive) and the regularized
/// calculus (resolvent, Yosida approximation and its slope, Moreau envelope).
/// Construction validates the normalization 0 in graph(0), sampled
/// monotonicity and jump nesting, and computes the admissible Yosida threshold
/// `nu_bar()`.
class MonotoneGraph {
 public:
  static constexpr double kTolRoot = 1e-12;
  static constexpr double kNuBarCap = 1e-1;
  static constexpr double kCertSlack = 1e-6;

  MonotoneGraph(std::string name, Domain domain, std::vector<Piece> pieces,
                std::vector<Jump> jumps, SlopeFloor floor,
                std::optional<GrowthBounds> growth = std::nullopt);

  // Built-in catalog.
  static MonotoneGraph identity();
  /// g(r) = linear * r + coeff * sign(r) |r|^k.
  static MonotoneGraph power(double k, double coeff = 1.0, double linear = 0.0);
  /// Subdifferential of the indicator of [0, inf) (side > 0) or (-inf, 0]
  /// (side < 0), plus `slope * r` on the interior.
  static MonotoneGraph indicator_halfline(int side, double slope = 0.0);
  /// c sign(r) ((1 - |r|/rbar)^(-kappa) - 1) on (-rbar, rbar).
  static MonotoneGraph singular_power(double rbar, double kappa, double c);
  /// log((1 + r) / (1 - r)) on (-1, 1); derivative of the logarithmic potential.
  static MonotoneGraph logarithmic();
  /// r + subdifferential of the indicator of (-inf, rbar].
  static MonotoneGraph upper_obstacle(double rbar);

  struct LinearPiece {
    double from, to, slope, intercept;
  };
  /// Piecewise-linear graph; pieces must be ordered and cover the domain
  /// interior, jumps given explicitly.
  static MonotoneGraph piecewise(Domain domain, const std::vector<LinearPiece>& pieces,
                                 std::vector<Jump> jumps, SlopeFloor floor);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const SlopeFloor& slope_floor() const { return floor_; }
  const std::optional<GrowthBounds>& growth() const { return growth_; }
  void set_growth(GrowthBounds g) { growth_ = g; }
  double nu_bar() const { return nu_bar_; }

  ValueInterval eval(double r) const;
  double minimal_section(double r) const;
  /// Unique r with s in r + nu * graph(r).
  double resolvent(double nu, double s) const;
  double yosida(double nu, double s) const;
  /// Generalized derivative of the Yosida approximation (semismooth selection).
  double yosida_slope(double nu, double s) const;
  /// Both of the above from one resolvent solve.
  YosidaValue yosida_with_slope(double nu, double s) const;
  /// Primitive of the Yosida approximation vanishing at 0 (Moreau envelope).
  double yosida_primitive(double nu, double s) const;
  /// Integral of the minimal section from 0 to r; +inf outside the effective domain.
  double primitive(double r) const;
  /// True if resolvent(nu, s) lands on a declared jump point.
  bool resolvent_at_jump(double nu, double s) const;
  /// Derivative of the graph at r where single valued; +inf on vertical parts.
  double slope(double r) const;

 private:
  const Piece* piece_at(double r) const;
  const Jump* jump_at(double r) const;
  double yosida_from(double nu, double s, double r) const;
  double yosida_slope_at(double nu, double r) const;
  void validate() const;
  double compute_nu_bar() const;
  double integrate(const Piece& p, double a, double b) const;

  std::string name_;
  Domain domain_;
  std::vector<Piece> pieces_;
  std::vector<Jump> jumps_;
  SlopeFloor floor_;
  std::optional<GrowthBounds> growth_;
  double nu_bar_ = kNuBarCap;
};

/// Samples consecutive difference quotients of the Yosida approximation on
/// `[window_lo, window_hi]`; passes iff every quotient is >= sigma (1 - slack).
CertificateReport yosida_slope_certificate(const MonotoneGraph& g, double nu, double window_lo,
                                           double window_hi, std::size_t n_samples);

/// Constant c such that the mean of g0(v) v is >= sigma v^2 - c for every v,
/// for a domain of measure `measure`.
double slope_floor_constant(const MonotoneGraph& g, double measure);

}  // namespace dnp

#include "dnp/monotone_graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign(double r) { return r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0); }

// |r|^k by repeated products for small integer k
double abs_pow(double r, double k) {
  const double a = std::abs(r);
  if (k == std::floor(k) && k >= 0.0 && k <= 8.0) {
    double out = 1.0;
    for (int i = 0; i < static_cast<int>(k); ++i) out *= a;
    return out;
  }
  return std::pow(a, k);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

bool Domain::in_closure(double r) const {
  if (std::isnan(r)) return false;
  return r >= lo.value && r <= hi.value;
}

bool Domain::in_domain(double r) const {
  if (!in_closure(r)) return false;
  if (r == lo.value && lo.kind == EndKind::Open) return false;
  if (r == hi.value && hi.kind == EndKind::Open) return false;
  return std::isfinite(r);
}

MonotoneGraph::MonotoneGraph(std::string name, Domain domain, std::vector<Piece> pieces,
                             std::vector<Jump> jumps, SlopeFloor floor,
                             std::optional<GrowthBounds> growth)
    : name_(std::move(name)),
      domain_(domain),
      pieces_(std::move(pieces)),
      jumps_(std::move(jumps)),
      floor_(floor),
      growth_(growth) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.at < b.at; });
  validate();
  nu_bar_ = compute_nu_bar();
}

// ---------------------------------------------------------------------------
// Catalog

MonotoneGraph MonotoneGraph::identity() {
  Piece p{-kInf, kInf, [](double r) { return r; }, [](double) { return 1.0; },
          [](double r) { return 0.5 * r * r; }};
  return MonotoneGraph("identity", Domain{}, {p}, {}, SlopeFloor{0.5, 0.0, 0.0},
                       GrowthBounds{1.0, 0.0, 0.0, 1.0, 1.0});
}

MonotoneGraph MonotoneGraph::power(double k, double coeff, double linear) {
  if (!(k >= 1.0) || !(coeff > 0.0) || linear < 0.0) {
    throw DomainError("power graph needs k >= 1, coeff > 0, linear >= 0");
  }
  Piece p{-kInf, kInf,
          [=](double r) { return linear * r + coeff * sign(r) * abs_pow(r, k); },
          [=](double r) {
            if (k == 1.0) return linear + coeff;
            return linear + coeff * k * abs_pow(r, k - 1.0);
          },
          [=](double r) { return 0.5 * linear * r * r + coeff * abs_pow(r, k + 1.0) / (k + 1.0); }};
  SlopeFloor floor;
  std::optional<GrowthBounds> growth;
  if (k == 1.0) {
    floor = {0.5 * (linear + coeff), 0.0, 0.0};
  } else if (linear > 0.0) {
    floor = {0.5 * linear, 0.0, 0.0};
    growth = GrowthBounds{linear, coeff, coeff, k, k};
  } else {
    // slope coeff * k |r|^(k-1) >= coeff * k for |r| >= 1
    floor = {0.5 * coeff * k, -1.0, 1.0};
  }
  std::ostringstream name;
  name << "power{k=" << k << ",coeff=" << coeff << ",linear=" << linear << "}";
  return MonotoneGraph(name.str(), Domain{}, {p}, {}, floor, growth);
}

MonotoneGraph MonotoneGraph::indicator_halfline(int side, double slope) {
  if (side == 0 || slope < 0.0) throw DomainError("indicator_halfline needs side != 0, slope >= 0");
  Piece p;
  p.value = [=](double r) { return slope * r; };
  p.slope = [=](double) { return slope; };
  p.antiderivative = [=](double r) { return 0.5 * slope * r * r; };
  Domain d;
  Jump j;
  j.at = 0.0;
  if (side > 0) {
    d.lo = {0.0, EndKind::Closed};
    p.lo = 0.0;
    p.hi = kInf;
    j.values = {-kInf, 0.0};
  } else {
    d.hi = {0.0, EndKind::Closed};
    p.lo = -kInf;
    p.hi = 0.0;
    j.values = {0.0, kInf};
  }
  std::ostringstream name;
  name << "indicator_halfline{side=" << (side > 0 ? "+" : "-") << ",slope=" << slope << "}";
  return MonotoneGraph(name.str(), d, {p}, {j}, SlopeFloor{0.5 * slope, 0.0, 0.0});
}

MonotoneGraph MonotoneGraph::singular_power(double rbar, double kappa, double c) {
  if (!(rbar > 0.0) || !(kappa > 0.0) || !(c > 0.0)) {
    throw DomainError("singular_power needs rbar, kappa, c > 0");
  }
  Piece p;
  p.lo = -rbar;
  p.hi = rbar;
  p.value = [=](double r) {
    const double q = 1.0 - std::abs(r) / rbar;
    if (q <= 0.0) return sign(r) * kInf;
    return c * sign(r) * (std::pow(q, -kappa) - 1.0);
  };
  p.slope = [=](double r) {
    const double q = 1.0 - std::abs(r) / rbar;
    if (q <= 0.0) return kInf;
    return c * kappa / rbar * std::pow(q, -kappa - 1.0);
  };
  p.antiderivative = [=](double r) {
    const double a = std::abs(r);
    const double q = 1.0 - a / rbar;
    if (q <= 0.0 && kappa >= 1.0) return kInf;
    if (kappa == 1.0) return c * (-rbar * std::log(q) - a);
    return c * (rbar / (kappa - 1.0) * (std::pow(q, 1.0 - kappa) - 1.0) - a);
  };
  Domain d{{-rbar, EndKind::Open}, {rbar, EndKind::Open}};
  std::ostringstream name;
  name << "singular_power{rbar=" << rbar << ",kappa=" << kappa << ",c=" << c << "}";
  return MonotoneGraph(name.str(), d, {p}, {}, SlopeFloor{0.5 * c * kappa / rbar, 0.0, 0.0});
}

MonotoneGraph MonotoneGraph::logarithmic() {
  Piece p;
  p.lo = -1.0;
  p.hi = 1.0;
  p.value = [](double r) {
    if (r >= 1.0) return kInf;
    if (r <= -1.0) return -kInf;
    return std::log1p(r) - std::log1p(-r);
  };
  p.slope = [](double r) {
    if (std::abs(r) >= 1.0) return kInf;
    return 2.0 / (1.0 - r * r);
  };
  p.antiderivative = [](double r) {
    auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    return xlogx(1.0 - r) + xlogx(1.0 + r);
  };
  Domain d{{-1.0, EndKind::Open}, {1.0, EndKind::Open}};
  return MonotoneGraph("logarithmic", d, {p}, {}, SlopeFloor{1.0, 0.0, 0.0});
}

MonotoneGraph MonotoneGraph::upper_obstacle(double rbar) {
  if (!(rbar > 0.0)) throw DomainError("upper_obstacle needs rbar > 0");
  Piece p{-kInf, rbar, [](double r) { return r; }, [](double) { return 1.0; },
          [](double r) { return 0.5 * r * r; }};
  Domain d{{-kInf, EndKind::Infinite}, {rbar, EndKind::Closed}};
  Jump j{rbar, {rbar, kInf}};
  std::ostringstream name;
  name << "upper_obstacle{rbar=" << rbar << "}";
  return MonotoneGraph(name.str(), d, {p}, {j}, SlopeFloor{0.5, 0.0, 0.0});
}

MonotoneGraph MonotoneGraph::piecewise(Domain domain, const std::vector<LinearPiece>& pieces,
                                       std::vector<Jump> jumps, SlopeFloor floor) {
  std::vector<Piece> out;
  out.reserve(pieces.size());
  for (const auto& lp : pieces) {
    if (!(lp.from < lp.to)) throw DomainError("piecewise: empty piece");
    if (lp.slope < 0.0) throw DomainError("piecewise: negative slope");
    const double s = lp.slope;
    const double b = lp.intercept;
    out.push_back(Piece{lp.from, lp.to, [=](double r) { return s * r + b; },
                        [=](double) { return s; },
                        [=](double r) { return 0.5 * s * r * r + b * r; }});
  }
  return MonotoneGraph("piecewise", domain, std::move(out), std::move(jumps), floor);
}

// ---------------------------------------------------------------------------
// Exact calculus

const Jump* MonotoneGraph::jump_at(double r) const {
  for (const auto& j : jumps_) {
    if (j.at == r) return &j;
  }
  return nullptr;
}

const Piece* MonotoneGraph::piece_at(double r) const {
  for (const auto& p : pieces_) {
    if (r >= p.lo && r <= p.hi) return &p;
  }
  return nullptr;
}

ValueInterval MonotoneGraph::eval(double r) const {
  if (!domain_.in_closure(r)) {
    throw DomainError(name_ + ": eval outside domain closure at r = " + fmt_double(r));
  }
  if (const Jump* j = jump_at(r)) return j->values;
  const Piece* p = piece_at(r);
  if (p == nullptr) {
    throw DomainError(name_ + ": no piece covers r = " + fmt_double(r));
  }
  double v = p->value(r);
  if (std::isnan(v)) v = (r >= domain_.hi.value) ? kInf : -kInf;
  return {v, v};
}

double MonotoneGraph::minimal_section(double r) const {
  if (!domain_.in_domain(r)) {
    throw DomainError(name_ + ": minimal_section outside domain at r = " + fmt_double(r));
  }
  const ValueInterval v = eval(r);
  if (v.lo <= 0.0 && 0.0 <= v.hi) return 0.0;
  return v.lo > 0.0 ? v.lo : v.hi;
}

double MonotoneGraph::slope(double r) const {
  if (jump_at(r) != nullptr) return kInf;
  const Piece* p = piece_at(r);
  if (p == nullptr) throw DomainError(name_ + ": slope outside domain");
  return p->slope(r);
}

double MonotoneGraph::resolvent(double nu, double s) const {
  if (!(nu > 0.0)) throw DomainError("resolvent needs nu > 0");
  if (std::isnan(s)) throw DomainError("resolvent of NaN");
  // 0 is in graph(0), so the root lies between 0 and s.
  double lo = std::max(std::min(0.0, s), domain_.closure_lo());
  double hi = std::min(std::max(0.0, s), domain_.closure_hi());
  if (lo == hi) return lo;

  for (const auto& j : jumps_) {
    if (j.at < lo || j.at > hi) continue;
    const double d = s - j.at;
    if (d >= nu * j.values.lo && d <= nu * j.values.hi) return j.at;
  }

  // Newton inside the bracket, bisection when a step leaves it or the bracket
  // stops halving over two iterations
  double x = 0.5 * (lo + hi);
  double width_two_ago = 2.0 * (hi - lo);
  double width_one_ago = hi - lo;
  for (int iter = 0; iter < 400; ++iter) {
    const ValueInterval v = eval(x);
    const double f_lo = x + nu * v.lo;
    const double f_hi = x + nu * v.hi;
    if (f_lo <= s && s <= f_hi) return x;
    if (s < f_lo) {
      hi = x;
    } else {
      lo = x;
    }
    const double scale = std::max(1.0, std::abs(x));
    if (hi - lo <= 4.0 * kEps * scale) return 0.5 * (lo + hi);

    double xn = x;
    bool use_newton = false;
    if (v.singleton() && std::isfinite(v.lo) && hi - lo <= 0.5 * width_two_ago) {
      const double d = 1.0 + nu * slope(x);
      if (std::isfinite(d) && d > 0.0) {
        xn = x - (f_lo - s) / d;
        use_newton = xn > lo && xn < hi;
      }
    }
    width_two_ago = width_one_ago;
    width_one_ago = hi - lo;
    if (use_newton) {
      const double dx = xn - x;
      x = xn;
      if (std::abs(dx) <= 2.0 * kEps * scale) return x;
    } else {
      x = 0.5 * (lo + hi);
    }
  }
  if (hi - lo <= kTolRoot) return 0.5 * (lo + hi);
  throw ConvergenceError(name_ + ": resolvent bracket not resolved for s = " + fmt_double(s));
}

// Inside a smooth piece s - j = nu g(j) exactly, and g(j) avoids the
// cancellation in (s - j) / nu for small nu.
double MonotoneGraph::yosida_from(double nu, double s, double r) const {
  if (jump_at(r) == nullptr) {
    if (const Piece* p = piece_at(r)) {
      // g(r) unless r was clamped to the last double before a barrier
      const double v = p->value(r);
      if (std::isfinite(v) && std::abs(s - r - nu * v) <= 64.0 * kTolRoot * (1.0 + std::abs(s))) {
        return v;
      }
    }
  }
  return (s - r) / nu;
}

double MonotoneGraph::yosida(double nu, double s) const {
  return yosida_from(nu, s, resolvent(nu, s));
}

bool MonotoneGraph::resolvent_at_jump(double nu, double s) const {
  return jump_at(resolvent(nu, s)) != nullptr;
}

double MonotoneGraph::yosida_slope(double nu, double s) const {
  return yosida_slope_at(nu, resolvent(nu, s));
}

double MonotoneGraph::yosida_slope_at(double nu, double r) const {
  if (jump_at(r) != nullptr) return 1.0 / nu;
  const double gp = slope(r);
  if (!std::isfinite(gp)) return 1.0 / nu;
  return gp / (1.0 + nu * gp);
}

YosidaValue MonotoneGraph::yosida_with_slope(double nu, double s) const {
  const double r = resolvent(nu, s);
  return {yosida_from(nu, s, r), yosida_slope_at(nu, r)};
}

double MonotoneGraph::yosida_primitive(double nu, double s) const {
  const double r = resolvent(nu, s);
  const double y = yosida_from(nu, s, r);
  return primitive(r) + 0.5 * nu * y * y;
}

double MonotoneGraph::integrate(const Piece& p, double a, double b) const {
  if (a == b) return 0.0;
  if (p.antiderivative) {
    const double fb = p.antiderivative(b);
    const double fa = p.antiderivative(a);
    if (std::isinf(fb) || std::isinf(fa)) return kInf;
    return fb - fa;
  }
  const bool sing_a = !std::isfinite(p.value(a));
  const bool sing_b = !std::isfinite(p.value(b));
  double err = 0.0;
  double l1 = 0.0;
  double result = 0.0;
  constexpr double tol = 1e-13;
  try {
    if (sing_a || sing_b) {
      boost::math::quadrature::tanh_sinh<double> integrator;
      result = integrator.integrate(p.value, a, b, tol, &err, &l1);
    } else {
      result = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p.value, a, b, 20, tol,
                                                                          &err, &l1);
    }
  } catch (const std::exception& e) {
    throw QuadratureError(name_ + ": quadrature failed on [" + fmt_double(a) + ", " +
                          fmt_double(b) + "]: " + e.what());
  }
  if (!std::isfinite(result) || err > 1e-9 * std::max(1.0, l1)) {
    if (sing_a || sing_b) {
      throw QuadratureError(name_ + ": singular integrand did not meet tolerance on [" +
                            fmt_double(a) + ", " + fmt_double(b) + "]");
    }
    throw QuadratureError(name_ + ": quadrature tolerance not met");
  }
  return result;
}

double MonotoneGraph::primitive(double r) const {
  if (!domain_.in_closure(r)) return kInf;
  if (r == 0.0) return 0.0;
  const double a = std::min(0.0, r);
  const double b = std::max(0.0, r);
  double total = 0.0;
  for (const auto& p : pieces_) {
    const double x0 = std::max(a, p.lo);
    const double x1 = std::min(b, p.hi);
    if (x0 >= x1) continue;
    const double part = integrate(p, x0, x1);
    if (std::isinf(part)) return kInf;
    total += part;
  }
  return r > 0.0 ? total : -total;
}

// ---------------------------------------------------------------------------
// Construction checks

void MonotoneGraph::validate() const {
  if (pieces_.empty()) throw DomainError(name_ + ": graph needs at least one piece");
  if (!domain_.in_domain(0.0)) throw DomainError(name_ + ": 0 must lie in the domain");
  if (!eval(0.0).contains(0.0)) throw DomainError(name_ + ": 0 must belong to graph(0)");
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    if (pieces_[k].lo < pieces_[k - 1].hi) throw DomainError(name_ + ": overlapping pieces");
  }
  // Closed finite ends of a maximal graph carry a vertical ray.
  if (domain_.lo.kind == EndKind::Closed) {
    const Jump* j = jump_at(domain_.lo.value);
    if (j == nullptr || j->values.lo != -kInf) {
      throw DomainError(name_ + ": closed lower end needs a jump down to -inf");
    }
  }
  if (domain_.hi.kind == EndKind::Closed) {
    const Jump* j = jump_at(domain_.hi.value);
    if (j == nullptr || j->values.hi != kInf) {
      throw DomainError(name_ + ": closed upper end needs a jump up to +inf");
    }
  }
  for (const auto& j : jumps_) {
    if (!(j.values.lo <= j.values.hi)) throw DomainError(name_ + ": empty jump interval");
    if (!domain_.in_closure(j.at)) throw DomainError(name_ + ": jump outside domain");
    double left = -kInf;
    double right = kInf;
    for (const auto& p : pieces_) {
      if (p.hi == j.at) left = p.value(j.at);
      if (p.lo == j.at) right = p.value(j.at);
    }
    const double slack = 1e-12 * (1.0 + std::abs(j.values.lo) + std::abs(j.values.hi));
    if ((std::isfinite(j.values.lo) && j.values.lo < left - slack) ||
        (std::isfinite(j.values.hi) && j.values.hi > right + slack)) {
      throw DomainError(name_ + ": jump at " + fmt_double(j.at) +
                        " not nested in adjacent piece limits");
    }
  }
  // Sampled monotonicity and slope floor on a finite window of the domain.
  const double w_lo = std::max(domain_.closure_lo(), -10.0);
  const double w_hi = std::min(domain_.closure_hi(), 10.0);
  constexpr int n = 2001;
  double prev_r = 0.0;
  double prev_hi = -kInf;
  double prev_val = 0.0;
  bool have_prev = false;
  for (int k = 0; k < n; ++k) {
    double r = w_lo + (w_hi - w_lo) * k / (n - 1);
    if (!domain_.in_domain(r)) continue;
    const ValueInterval v = eval(r);
    if (have_prev && v.lo < prev_hi - 1e-12 * (1.0 + std::abs(prev_hi))) {
      throw DomainError(name_ + ": graph is not nondecreasing near r = " + fmt_double(r));
    }
    if (have_prev && v.singleton() && std::isfinite(v.lo) && std::isfinite(prev_val) &&
        jump_at(r) == nullptr && floor_.sigma > 0.0 &&
        (prev_r >= floor_.flat_hi || r <= floor_.flat_lo)) {
      const double q = (v.lo - prev_val) / (r - prev_r);
      if (q < 2.0 * floor_.sigma * (1.0 - 1e-9)) {
        throw DomainError(name_ + ": slope floor 2 sigma violated near r = " + fmt_double(r));
      }
    }
    prev_r = r;
    prev_hi = v.hi;
    prev_val = v.singleton() ? v.lo : kInf;
    have_prev = true;
  }
}

double MonotoneGraph::compute_nu_bar() const {
  double nu = kNuBarCap;
  if (floor_.sigma > 0.0) nu = std::min(nu, 1.0 / (2.0 * floor_.sigma));
  // (Id + nu g)([S-, S+]) must stay inside [2 S-, 2 S+].
  if (floor_.flat_hi > 0.0) {
    const double top = eval(floor_.flat_hi).hi;
    if (top > 0.0) nu = std::min(nu, floor_.flat_hi / top);
  }
  if (floor_.flat_lo < 0.0) {
    const double bottom = eval(floor_.flat_lo).lo;
    if (bottom < 0.0) nu = std::min(nu, floor_.flat_lo / bottom);
  }
  return nu;
}

// ---------------------------------------------------------------------------

CertificateReport yosida_slope_certificate(const MonotoneGraph& g, double nu, double window_lo,
                                           double window_hi, std::size_t n_samples) {
  CertificateReport rep;
  const auto& fl = g.slope_floor();
  if (n_samples < 2 || !(window_lo < window_hi)) {
    rep.note = "window needs two distinct samples";
    return rep;
  }
  if (nu > g.nu_bar() * (1.0 + 1e-12)) {
    rep.note = "nu exceeds nu_bar";
    return rep;
  }
  if (window_hi > 2.0 * fl.flat_lo && window_lo < 2.0 * fl.flat_hi) {
    rep.note = "window intersects the doubled flat window";
    return rep;
  }
  double prev_s = window_lo;
  double prev_y = g.yosida(nu, prev_s);
  for (std::size_t k = 1; k < n_samples; ++k) {
    const double s = window_lo + (window_hi - window_lo) * static_cast<double>(k) /
                                     static_cast<double>(n_samples - 1);
    const double y = g.yosida(nu, s);
    rep.min_slope = std::min(rep.min_slope, (y - prev_y) / (s - prev_s));
    prev_s = s;
    prev_y = y;
  }
  rep.pass = rep.min_slope >= fl.sigma * (1.0 - MonotoneGraph::kCertSlack);
  return rep;
}

double slope_floor_constant(const MonotoneGraph& g, double measure) {
  const auto& fl = g.slope_floor();
  const double s = std::max(fl.flat_hi * fl.flat_hi, fl.flat_lo * fl.flat_lo);
  return fl.sigma * s * measure;
}

}  // namespace dnp

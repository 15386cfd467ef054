#include "dnp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnp/errors.hpp"

namespace dnp {

Forcing Forcing::constant(Eigen::VectorXd f) {
  Forcing out;
  out.kind = Kind::Constant;
  out.field = std::move(f);
  return out;
}

Forcing Forcing::decaying(Eigen::VectorXd g, double rate) {
  if (!(rate > 0.0)) throw DomainError("decaying forcing needs rate > 0");
  Forcing out;
  out.kind = Kind::Decaying;
  out.field = std::move(g);
  out.rate = rate;
  return out;
}

Forcing Forcing::tabulated(std::vector<double> times, std::vector<Eigen::VectorXd> values) {
  if (times.size() != values.size() || times.empty()) {
    throw ShapeError("tabulated forcing needs one field per time");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw DomainError("tabulated forcing times must increase");
    if (values[k].size() != values[0].size()) throw ShapeError("tabulated forcing sizes differ");
  }
  Forcing out;
  out.kind = Kind::Tabulated;
  out.times = std::move(times);
  out.table = std::move(values);
  return out;
}

Eigen::VectorXd Forcing::at(double t, std::size_t n) const {
  const auto sz = static_cast<Eigen::Index>(n);
  switch (kind) {
    case Kind::Zero:
      return Eigen::VectorXd::Zero(sz);
    case Kind::Constant:
      if (field.size() != sz) throw ShapeError("forcing field does not match the grid");
      return field;
    case Kind::Decaying:
      if (field.size() != sz) throw ShapeError("forcing field does not match the grid");
      return field * std::exp(-rate * t);
    case Kind::Tabulated: {
      const double tol = 1e-12 * std::max(1.0, std::abs(t));
      auto it = std::lower_bound(times.begin(), times.end(), t - tol);
      if (it == times.end() || std::abs(*it - t) > tol) {
        throw DomainError("tabulated forcing has no entry at t = " + std::to_string(t));
      }
      const auto& v = table[static_cast<std::size_t>(it - times.begin())];
      if (v.size() != sz) throw ShapeError("forcing table does not match the grid");
      return v;
    }
  }
  return Eigen::VectorXd::Zero(sz);
}

Forcing::Tail Forcing::tail(const EllipticOperator& op, double xi) const {
  Tail out;
  auto hsq = [&](const Eigen::VectorXd& v) {
    return (op.mass().array() * v.array().square()).sum();
  };
  switch (kind) {
    case Kind::Zero:
      out.exponent = std::numeric_limits<double>::infinity();
      return out;
    case Kind::Constant: {
      const double q = hsq(field);
      out.bounded = q == 0.0;
      out.sup_value = q == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      out.exponent = q == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      return out;
    }
    case Kind::Decaying: {
      const double q = hsq(field);
      const double ts = (1.0 + xi) / (2.0 * rate);
      out.sup_value = std::pow(ts, 1.0 + xi) * q * std::exp(-(1.0 + xi)) / (2.0 * rate);
      out.exponent = std::numeric_limits<double>::infinity();
      return out;
    }
    case Kind::Tabulated: {
      const std::size_t n = times.size();
      std::vector<double> q(n);
      for (std::size_t k = 0; k < n; ++k) q[k] = hsq(table[k]);
      double acc = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        if (k + 1 < n) acc += 0.5 * (q[k] + q[k + 1]) * (times[k + 1] - times[k]);
        out.sup_value = std::max(out.sup_value, std::pow(std::max(times[k], 0.0), 1.0 + xi) * acc);
      }
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (std::size_t k = n / 2; k < n; ++k) {
        if (times[k] <= 0.0 || q[k] <= 0.0) continue;
        const double x = std::log(times[k]);
        const double y = std::log(q[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
      }
      if (cnt < 2) {
        out.exponent = std::numeric_limits<double>::infinity();
        return out;
      }
      const double den = cnt * sxx - sx * sx;
      out.exponent = den > 0.0 ? -(cnt * sxy - sx * sy) / den : 0.0;
      out.bounded = out.exponent >= 2.0 + xi - 0.05;
      return out;
    }
  }
  return out;
}

}  // namespace dnp

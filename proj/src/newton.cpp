#include "dnp/newton.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <span>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

struct Eval {
  Eigen::VectorXd r;
  Eigen::VectorXd slope;
  double norm = 0.0;
  /// Size of the largest term in the residual, for the rounding floor.
  double scale = 0.0;
};

Eval evaluate(const NodalSystem& sys, const Eigen::VectorXd& x) {
  const EllipticOperator& op = *sys.op;
  Eval ev;
  ev.r = energy_gradient(op, Field{x, 0.0});
  const Eigen::VectorXd grad = ev.r;
  ev.slope = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd local_abs = Eigen::VectorXd::Zero(x.size());
  const auto& m = op.mass();
  const auto& freemask = op.free();
  const auto n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (!freemask[uj]) continue;
    const LocalTerm t = sys.local(uj, x[j]);
    ev.r[j] += m[j] * t.value;
    ev.slope[j] = t.slope;
    local_abs[j] = m[j] * std::abs(t.value);
  }
  ev.norm = residual_norm(op, ev.r);
  ev.scale = residual_norm(op, grad.cwiseAbs() + local_abs);
  return ev;
}

}  // namespace

double residual_norm(const EllipticOperator& op, const Eigen::VectorXd& r) {
  double s = 0.0;
  const auto& m = op.mass();
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (op.free()[static_cast<std::size_t>(j)]) s += r[j] * r[j] / m[j];
  }
  return std::sqrt(s);
}

Eigen::VectorXd system_residual(const NodalSystem& sys, const Eigen::VectorXd& x) {
  return evaluate(sys, x).r;
}

InnerResult inner_solve(const NodalSystem& sys, const Eigen::VectorXd& x0,
                        const InnerOptions& opts) {
  const EllipticOperator& op = *sys.op;
  const auto& dofs = op.dofs();
  const auto nd = static_cast<Eigen::Index>(dofs.size());
  InnerResult res;
  res.x = x0;
  Eval ev = evaluate(sys, res.x);
  res.history.push_back(ev.norm);
  if (!std::isfinite(ev.norm)) {
    throw NewtonDivergence("non-finite residual at the initial iterate",
                           {x0.data(), x0.data() + x0.size()}, res.history);
  }
  auto rounding_floor = [](const Eval& e) {
    return 64.0 * std::numeric_limits<double>::epsilon() * e.scale;
  };
  auto diverge = [&](const std::string& why) {
    throw NewtonDivergence(why, {res.x.data(), res.x.data() + res.x.size()}, res.history);
  };

  while (ev.norm > opts.tol) {
    if (res.iterations >= opts.max_iter) diverge("inner solver hit max_iter");
    const Linearization lin = assemble_linearization(op, Field{res.x, 0.0});
    res.degenerate_cells = std::max(res.degenerate_cells, lin.degenerate_cells);
    Eigen::SparseMatrix<double> jac = lin.reduced();
    Eigen::VectorXd rhs(nd);
    for (Eigen::Index k = 0; k < nd; ++k) {
      const int j = dofs[static_cast<std::size_t>(k)];
      jac.coeffRef(k, k) += op.mass()[j] * ev.slope[j];
      rhs[k] = -ev.r[j];
    }
    Eigen::VectorXd d;
    {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(jac);
      if (ldlt.info() == Eigen::Success) d = ldlt.solve(rhs);
    }
    if (d.size() != nd || !d.allFinite() || (jac * d - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.analyzePattern(jac);
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) diverge("singular Newton matrix");
      d = lu.solve(rhs);
      if (!d.allFinite()) diverge("non-finite Newton direction");
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial = res.x;
    Eval next;
    while (t > 1e-10) {
      for (Eigen::Index k = 0; k < nd; ++k) {
        const int j = dofs[static_cast<std::size_t>(k)];
        trial[j] = res.x[j] + t * d[k];
      }
      next = evaluate(sys, trial);
      if (std::isfinite(next.norm) && next.norm <= (1.0 - 1e-4 * t) * ev.norm) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++res.iterations;
    if (!accepted) {
      // no descent left: fine if the residual is already at rounding level or
      // the Newton step no longer moves any node by more than a few ulps
      if (ev.norm <= std::max(opts.tol, rounding_floor(ev))) break;
      double xmax = 1.0;
      for (const int j : dofs) xmax = std::max(xmax, std::abs(res.x[j]));
      if (d.lpNorm<Eigen::Infinity>() <= 16.0 * std::numeric_limits<double>::epsilon() * xmax) break;
      diverge("line search stalled at residual " + std::to_string(ev.norm));
    }
    res.x = trial;
    ev = std::move(next);
    res.history.push_back(ev.norm);
    if (ev.norm <= rounding_floor(ev)) break;
  }
  res.residual = ev.norm;
  return res;
}

}  // namespace dnp

#include <cmath>

#include "doctest.h"
#include "dnp/errors.hpp"
#include "dnp/newton.hpp"
#include "dnp/stationary.hpp"
#include "dnp/stepper.hpp"

using namespace dnp;

namespace {

Model heat_like(const Grid& g) {
  return Model{EllipticOperator::linear(g), Potential::quadratic(), MonotoneGraph::identity()};
}

Eigen::VectorXd sine(const Grid& g, double amp = 1.0) {
  return sample(g, [amp](double x, double) { return amp * std::sin(M_PI * x); }).values;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("scalar sanity step gives 2/3") {
  // Neumann, spatially constant data: B u = 0 and every node is the scalar problem
  const Grid g = Grid::line(1.0, 5, Boundary::Neumann0);
  const Model m{EllipticOperator::linear(g), Potential::quadratic(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 0.5;
  cfg.T = 0.5;
  cfg.epsilon = 1e-12;
  const StepResult r = step(Eigen::VectorXd::Ones(5), 1, cfg, m);
  for (Eigen::Index j = 0; j < 5; ++j) CHECK(r.u[j] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("a stationary state is a fixed point with no Newton corrections") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 0.1;
  cfg.epsilon = 1e-6;
  // stationary: B u + beta_eps(u) + eps u = lambda u + f with f chosen to fit u
  const Eigen::VectorXd u = sine(g, 0.5);
  Eigen::VectorXd f = apply_b(m.op, Field{u, 0}).values;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    f[j] += m.pot.beta.yosida(cfg.epsilon, u[j]) + (cfg.epsilon - m.pot.lambda) * u[j];
    if (!m.op.free()[static_cast<std::size_t>(j)]) f[j] = 0.0;
  }
  cfg.forcing = Forcing::constant(f);
  const StepResult r = step(u, 1, cfg, m);
  CHECK(r.entry.newton_iters == 0);
  CHECK((r.u - u).cwiseAbs().maxCoeff() == 0.0);

  const Trajectory tr = run(m, cfg, u);
  for (const auto& s : tr.states) CHECK((s - u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("double well keeps the zero state") {
  const Grid g = Grid::line(1.0, 51, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 1e-2;
  const StepResult r = step(Eigen::VectorXd::Zero(51), 1, cfg, m);
  CHECK(r.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inner solve: linear system in one iteration, exact start in zero") {
  const Grid g = Grid::line(1.0, 31, Boundary::Dirichlet0);
  const auto op = EllipticOperator::linear(g);
  const Eigen::VectorXd rhs = sine(g);
  NodalSystem sys{&op, [&](std::size_t j, double x) {
                    return LocalTerm{2.0 * x - rhs[static_cast<Eigen::Index>(j)], 2.0};
                  }};
  const InnerResult a = inner_solve(sys, Eigen::VectorXd::Zero(31), {1e-10, 20});
  CHECK(a.iterations == 1);
  CHECK(a.residual <= 1e-10);
  const InnerResult b = inner_solve(sys, a.x, {1e-8, 20});
  CHECK(b.iterations == 0);
}

TEST_CASE("inner solve through the Yosida kink agrees with bisection") {
  // one node: alpha_nu of the half-line indicator has a kink at 0
  const Grid g = Grid::line(1.0, 3, Boundary::Neumann0);
  const auto op = EllipticOperator::linear(g);
  const auto alpha = MonotoneGraph::indicator_halfline(1, 2.0);
  const double nu = 1e-3, tau = 0.1, uprev = 0.3;
  for (double f : {-5.0, -0.5, 0.0, 0.2, 4.0}) {
    auto scalar = [&](double x) { return alpha.yosida(nu, (x - uprev) / tau) + x * x * x - f; };
    NodalSystem sys{&op, [&](std::size_t, double x) {
                      const double s = (x - uprev) / tau;
                      return LocalTerm{scalar(x), alpha.yosida_slope(nu, s) / tau + 3 * x * x};
                    }};
    const InnerResult r = inner_solve(sys, Eigen::VectorXd::Constant(3, uprev), {1e-12, 60});
    CHECK(r.x[1] == doctest::Approx(bisect(scalar, -10.0, 10.0)).epsilon(1e-9));
  }
}

TEST_CASE("identity graphs reduce the step to backward Euler") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  const Model m = heat_like(g);
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 1e-2;
  cfg.epsilon = 1e-3;
  cfg.nu = 2e-3;
  cfg.tol_newton = 1e-12;
  const Eigen::VectorXd u0 = sine(g);
  const StepResult r = step(u0, 1, cfg, m);

  const Linearization lin = assemble_linearization(m.op, Field{u0, 0});
  Eigen::SparseMatrix<double> a = lin.scaled();
  const double diag = 1.0 / (cfg.tau * (1 + cfg.nu)) + 1.0 / (1 + cfg.epsilon) + cfg.epsilon;
  for (Eigen::Index k = 0; k < a.rows(); ++k) a.coeffRef(k, k) += diag;
  Eigen::VectorXd b(a.rows());
  for (std::size_t k = 0; k < lin.dofs.size(); ++k) {
    b[static_cast<Eigen::Index>(k)] = u0[lin.dofs[k]] / (cfg.tau * (1 + cfg.nu));
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  const Eigen::VectorXd ref = lu.solve(b);
  for (std::size_t k = 0; k < lin.dofs.size(); ++k) {
    CHECK(r.u[lin.dofs[k]] == doctest::Approx(ref[static_cast<Eigen::Index>(k)]).epsilon(1e-9));
  }
}

TEST_CASE("ledger inequalities and monotone energy on a double well") {
  const Grid g = Grid::line(1.0, 51, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 5e-3;
  cfg.T = 0.5;
  const Trajectory tr = run(m, cfg, sine(g, 1.2));
  REQUIRE(tr.ledger.size() == 100);
  for (std::size_t k = 0; k < tr.ledger.size(); ++k) {
    CHECK(tr.ledger[k].step_pass);
    CHECK(tr.ledger[k].t == doctest::Approx(static_cast<double>(k + 1) * cfg.tau));
    if (k > 0) CHECK(tr.ledger[k].energy_reg <= tr.ledger[k - 1].energy_reg + 10 * cfg.tol_newton);
  }
  CHECK(tr.states.front() == sine(g, 1.2));
}

TEST_CASE("scheme config validation and tabulated forcing coverage") {
  const Grid g = Grid::line(1.0, 11, Boundary::Dirichlet0);
  const Model m = heat_like(g);
  SchemeConfig cfg;
  cfg.tau = 0.3;
  cfg.T = 1.0;
  CHECK_THROWS_AS(validate_scheme(cfg, m.alpha), DomainError);
  cfg.tau = 0.25;
  cfg.nu = 0.5;
  CHECK_THROWS_AS(validate_scheme(cfg, m.alpha), DomainError);
  cfg.nu = 0.0;
  cfg.forcing = Forcing::tabulated({0.0, 0.5}, {Eigen::VectorXd::Zero(11), Eigen::VectorXd::Zero(11)});
  CHECK_THROWS_AS(run(m, cfg, Eigen::VectorXd::Zero(11)), DomainError);
  CHECK_THROWS_AS(Forcing::decaying(Eigen::VectorXd::Zero(11), -1.0), DomainError);
}

TEST_CASE("unrecoverable divergence aborts with a partial trajectory") {
  const Grid g = Grid::line(1.0, 21, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::singular_power(2.0), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 0.1;
  cfg.T = 1.0;
  cfg.max_newton = 1;
  cfg.tol_newton = 1e-14;
  cfg.forcing = Forcing::constant(Eigen::VectorXd::Constant(21, 50.0));
  const Trajectory tr = run(m, cfg, Eigen::VectorXd::Zero(21));
  CHECK(tr.aborted);
  CHECK(tr.ledger.size() < 10);
  CHECK(tr.states.size() >= 1);
  CHECK_FALSE(tr.abort_reason.empty());
}

TEST_CASE("continuation with identical rungs has zero differences") {
  const Grid g = Grid::line(1.0, 21, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 0.2;
  const Rung r{1e-2, 1e-4, 1e-4};
  const ContinuationReport rep = continuation_study(m, cfg, sine(g), {r, r, r});
  for (double d : rep.linf_h) CHECK(d == 0.0);
  for (double d : rep.c0_h) CHECK(d == 0.0);
  CHECK_THROWS_AS(continuation_study(m, cfg, sine(g), {{1e-2, 1e-4, 1e-4}, {2e-2, 1e-4, 1e-4}}),
                  DomainError);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "dnp/errors.hpp"
#include "dnp/stationary.hpp"

using namespace dnp;

namespace {

Eigen::VectorXd sine(const Grid& g, double amp = 1.0) {
  return sample(g, [amp](double x, double) { return amp * std::sin(M_PI * x); }).values;
}

Trajectory constant_trajectory(const Eigen::VectorXd& u, std::size_t n, double tau) {
  Trajectory tr;
  tr.tau = tau;
  for (std::size_t k = 0; k <= n; ++k) {
    tr.indices.push_back(static_cast<long>(k));
    tr.states.push_back(u);
    if (k > 0) {
      LedgerEntry e;
      e.i = static_cast<long>(k);
      e.t = static_cast<double>(k) * tau;
      tr.ledger.push_back(e);
    }
  }
  return tr;
}

}  // namespace

TEST_CASE("stationary solve: manufactured sine") {
  for (int n : {51, 101}) {
    const Grid g = Grid::line(1.0, n, Boundary::Dirichlet0);
    const auto op = EllipticOperator::linear(g);
    const Eigen::VectorXd gf = (1 + M_PI * M_PI) * sine(g);
    const StationaryReport r = solve_stationary(op, Potential::quadratic(), gf, {1e-4, 1e-8, 1e-12},
                                                Eigen::VectorXd::Zero(n));
    // discrete eigenvalue of the three-point stencil gives the exact discrete amplitude
    const double h = g.h(0);
    const double lam_h = 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 2), 2);
    const double amp = (1 + M_PI * M_PI) / (1 + lam_h);
    CHECK((r.u - amp * sine(g)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((r.u - sine(g)).cwiseAbs().maxCoeff() <= std::pow(M_PI, 4) / 12 / (1 + M_PI * M_PI) * h * h * 1.01);
    CHECK(r.residual <= 1e-6);
  }
}

TEST_CASE("stationary solve: zero branch and the sign window") {
  const Grid g = Grid::line(1.0, 41, Boundary::Neumann0);
  const auto op = EllipticOperator::linear(g);
  const Potential dw = Potential::double_well();
  const StationaryReport z = solve_stationary(op, dw, Eigen::VectorXd::Zero(41), {1e-4, 1e-8},
                                              Eigen::VectorXd::Zero(41));
  CHECK(z.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.newton_iters == 0);

  const auto& w = *dw.analytic_window;
  const double m = 0.5 * w.margin + 0.5;
  const StationaryReport c = solve_stationary(op, dw, Eigen::VectorXd::Constant(41, m), {1e-4, 1e-8},
                                              Eigen::VectorXd::Constant(41, 1.0));
  CHECK(c.min_u >= w.lo);
  CHECK(c.max_u <= w.hi);
  CHECK_THROWS_AS(solve_stationary(op, dw, Eigen::VectorXd::Zero(41), {1e-4, 1e-2}, Eigen::VectorXd::Zero(41)),
                  DomainError);
}

TEST_CASE("stationary output is a fixed point of a zero-forcing run") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  const StationaryReport st = solve_stationary(m.op, m.pot, Eigen::VectorXd::Zero(41), {1e-6},
                                               sine(g, 0.9), 1e-6, 1e-12);
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 0.2;
  cfg.epsilon = 1e-6;
  const Trajectory tr = run(m, cfg, st.u);
  for (const auto& e : tr.ledger) CHECK(e.du_sup * cfg.tau <= 10 * cfg.tol_newton);
}

TEST_CASE("omega limit on a constant trajectory and the weak inclusion flag") {
  const Grid g = Grid::line(1.0, 21, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  const Trajectory tr = constant_trajectory(Eigen::VectorXd::Zero(21), 60, 0.1);
  const auto rep = omega_limit_detect(tr, m, Forcing::zero(), 1e-8, 1e-6);
  REQUIRE(rep.has_value());
  CHECK(rep->stationary.residual == 0.0);
  CHECK_FALSE(rep->stationary.weak_inclusion);

  // alpha(0) = [-1, 1]: residual measured against the interval
  dnp::Domain d;
  const Model mj{EllipticOperator::linear(g), Potential::double_well(),
                 MonotoneGraph::piecewise(d, {{-dnp::kInf, 0.0, 1.0, -1.0}, {0.0, dnp::kInf, 1.0, 1.0}},
                                          {{0.0, {-1.0, 1.0}}}, {0.5, 0.0, 0.0})};
  Eigen::VectorXd u = sine(g, 0.05);
  const auto wr = omega_limit_detect(constant_trajectory(u, 60, 0.1), mj, Forcing::zero(), 1e-8, 1.0);
  REQUIRE(wr.has_value());
  CHECK(wr->stationary.weak_inclusion);
  CHECK(wr->stationary.residual <= stationary_residual(mj.op, mj.pot, u, Eigen::VectorXd::Zero(21)));

  Trajectory moving = constant_trajectory(u, 60, 0.1);
  moving.ledger.back().du_sup = 1.0;
  CHECK_FALSE(omega_limit_detect(moving, m, Forcing::zero(), 1e-8, 1e-6).has_value());
}

TEST_CASE("tail window") {
  CHECK(tail_window(10) == 10);
  CHECK(tail_window(100) == 50);
  CHECK(tail_window(1000) == 250);
}

TEST_CASE("decay fits on exact laws") {
  std::vector<double> t, d, e;
  for (int k = 1; k <= 30; ++k) {
    t.push_back(0.5 * k);
    d.push_back(3.0 * std::pow(0.5 * k, -2.0));
    e.push_back(5.0 * std::exp(-0.7 * 0.5 * k));
  }
  const DecayFit a = fit_decay(t, d, DecayFit::Mode::Algebraic);
  CHECK(a.c == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(a.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));
  const DecayFit x = fit_decay(t, e, DecayFit::Mode::Exponential);
  CHECK(x.exponent == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(x.c == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay({1, 2, 3}, {1, 1, 1}, DecayFit::Mode::Exponential), InsufficientData);
}

TEST_CASE("Lojasiewicz probe: equilibrium, quadratic energy, preconditions") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  const Model quad{EllipticOperator::linear(g), Potential::quadratic(), MonotoneGraph::identity()};
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.45};
  const LojProbe eq = lojasiewicz_probe(constant_trajectory(Eigen::VectorXd::Zero(41), 80, 0.1),
                                        Eigen::VectorXd::Zero(41), quad, Eigen::VectorXd::Zero(41), grid);
  CHECK(eq.c_l == 0.0);
  CHECK(eq.samples.empty());

  SchemeConfig cfg;
  cfg.tau = 1e-3;
  cfg.T = 0.4;
  cfg.epsilon = 1e-10;
  const Trajectory tr = run(quad, cfg, sine(g) + 0.3 * sample(g, [](double x, double) {
                                         return std::sin(2 * M_PI * x);
                                       }).values);
  const LojProbe q = lojasiewicz_probe(tr, Eigen::VectorXd::Zero(41), quad, Eigen::VectorXd::Zero(41), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(q.bounded[k]);
  CHECK(q.theta == 0.45);

  const Model pl{EllipticOperator::p_laplace(g, 3.0), Potential::quadratic(), MonotoneGraph::identity()};
  CHECK_THROWS_AS(lojasiewicz_probe(tr, Eigen::VectorXd::Zero(41), pl, Eigen::VectorXd::Zero(41), grid),
                  PreconditionError);
}

TEST_CASE("discrete dual norm is dominated by the H norm") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g = Grid::square(1.0, 1.0, 15, 15, Boundary::Dirichlet0);
  const auto op = EllipticOperator::linear(g);
  const DualNorm dual(g);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = u(rng);
    CHECK(dual(v) <= h_norm(op, v) * (1 + 1e-12));
  }
}

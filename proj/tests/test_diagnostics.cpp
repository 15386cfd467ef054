#include <cmath>
#include <random>

#include "doctest.h"
#include "dnp/diagnostics.hpp"
#include "dnp/errors.hpp"

using namespace dnp;

namespace {

Eigen::VectorXd sine(const Grid& g, double amp = 1.0) {
  return sample(g, [amp](double x, double) { return amp * std::sin(M_PI * x); }).values;
}

}  // namespace

TEST_CASE("energy examples") {
  const Grid gd = Grid::line(1.0, 101, Boundary::Dirichlet0);
  const Grid gn = Grid::line(1.0, 101, Boundary::Neumann0);
  const auto dw = Potential::double_well();
  CHECK(energy(EllipticOperator::linear(gd), dw, Eigen::VectorXd::Zero(101)) == doctest::Approx(0.25));
  CHECK(energy(EllipticOperator::linear(gn), dw, Eigen::VectorXd::Ones(101)) == doctest::Approx(0.0).epsilon(1e-14));
  const double h = gn.h(0);
  const double e = energy(EllipticOperator::linear(gn), Potential::quadratic(),
                          sample(gn, [](double x, double) { return x; }).values);
  CHECK(std::abs(e - (0.5 + 1.0 / 6.0)) <= h * h);
  CHECK(energy(EllipticOperator::linear(gn), Potential::singular_power(2.0), Eigen::VectorXd::Constant(101, 1.5)) ==
        kInf);
}

TEST_CASE("step inequality: stationary, dissipative, adversarial") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::quadratic(), MonotoneGraph::identity()};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(41);
  const Eigen::VectorXd u = sine(g);
  const StepCheck same = check_step_inequality(m, 1e-6, u, u, 0.0, zero, 1e-9);
  CHECK(same.pass);
  CHECK(std::abs(same.lhs) <= same.tol);

  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 1e-2;
  const StepResult r = step(u, 1, cfg, m);
  CHECK(r.entry.step_pass);
  CHECK(energy(m.op, m.pot, r.u) <= energy(m.op, m.pot, u));

  const StepCheck bad = check_step_inequality(m, 1e-6, 0.5 * u, u, 0.0, zero, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK(bad.margin < 0.0);
}

TEST_CASE("uniform bounds: zero trajectory and generic regime note") {
  const Grid g = Grid::line(1.0, 21, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 0.1;
  cfg.T = 2.0;
  const Trajectory tr = run(m, cfg, Eigen::VectorXd::Zero(21));
  const UniformBoundReport r = uniform_bound_monitor(tr, Regime::S0_f1);
  CHECK(r.full.u == 0.0);
  CHECK(r.full.bu == 0.0);
  CHECK(r.full.du == 0.0);
  CHECK(r.full.energy == doctest::Approx(0.25 * g.volume()));
  CHECK(r.pass);
  const UniformBoundReport gen = uniform_bound_monitor(tr, Regime::Generic);
  CHECK_FALSE(gen.asserted);
  CHECK(gen.note.find("linearly") != std::string::npos);
}

TEST_CASE("uniform bounds under constant forcing do not grow with T") {
  const Grid g = Grid::line(1.0, 41, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 4.0;
  cfg.forcing = Forcing::constant(Eigen::VectorXd::Constant(41, 1.0));
  const UniformBoundReport a = uniform_bound_monitor(run(m, cfg, sine(g, 0.5)), Regime::F2);
  cfg.T = 8.0;
  const UniformBoundReport b = uniform_bound_monitor(run(m, cfg, sine(g, 0.5)), Regime::F2);
  CHECK(a.pass);
  CHECK(b.pass);
  CHECK(b.full.bu == doctest::Approx(a.full.bu).epsilon(1e-3));
  CHECK(b.full.energy == doctest::Approx(a.full.energy).epsilon(1e-3));
}

TEST_CASE("separation monitor") {
  const Grid g = Grid::line(1.0, 21, Boundary::Dirichlet0);
  Trajectory tr;
  tr.tau = 0.1;
  tr.indices = {0, 1};
  tr.states = {Eigen::VectorXd::Zero(21), Eigen::VectorXd::Zero(21)};
  const SeparationReport r = separation_monitor(tr, g, Potential::singular_power(2.0), 0.5);
  CHECK(r.min_margin == 1.0);
  CHECK(r.pass);
  CHECK(r.compatible);
  CHECK_THROWS_AS(separation_monitor(tr, g, Potential::logarithmic(), 0.5), MissingMetadata);
}

TEST_CASE("Holder quotient settles under refinement for a smooth profile") {
  double prev = 0.0;
  for (int n : {21, 41, 81, 161}) {
    const Grid g = Grid::line(1.0, n, Boundary::Dirichlet0);
    const double c = holder_constant(g, sine(g), 0.5);
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
  // |sin(pi x) - sin(pi y)| / |x - y|^0.5 over |x - y| <= 0.25
  CHECK(prev <= 2.0);
}

TEST_CASE("discrete Gronwall") {
  const std::size_t n = 40;
  std::vector<Eigen::VectorXd> v(n, Eigen::VectorXd::Constant(3, 0.5));
  std::vector<Eigen::VectorXd> z(n, Eigen::VectorXd::Zero(3));
  const GronwallReport a = discrete_gronwall(v, z, 0.1, 1.0);
  CHECK(a.pass);
  CHECK(a.c_prime >= 1.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::VectorXd> zz(n, Eigen::VectorXd::Zero(3));
  for (auto& e : zz) e = Eigen::Vector3d(u(rng), u(rng), u(rng));
  const GronwallReport b = discrete_gronwall(v, zz, 0.1, 1.0);
  CHECK(b.pass);

  for (int trial = 0; trial < 20; ++trial) {
    // v^m built to satisfy the hypothesis with equality-ish slack
    std::vector<Eigen::VectorXd> vs, zs;
    const double c = 1.0 + trial;
    Eigen::VectorXd vm = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.5;
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      Eigen::VectorXd zm = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.2;
      if (m > 0) {
        Eigen::VectorXd cand = vm + 0.1 * Eigen::Vector3d(u(rng), u(rng), u(rng));
        if (cand.squaredNorm() > c + c * (sum + zm.dot(cand - vm))) cand = vm;
        sum += zm.dot(cand - vm);
        vm = cand;
      }
      vs.push_back(vm);
      zs.push_back(zm);
    }
    const GronwallReport rep = discrete_gronwall(vs, zs, 0.1, c);
    double brute = 0.0;
    for (const auto& x : vs) brute = std::max(brute, x.norm());
    CHECK(rep.max_v == doctest::Approx(brute));
    CHECK(rep.pass);
  }

  std::vector<Eigen::VectorXd> big(n, Eigen::VectorXd::Constant(3, 5.0));
  try {
    discrete_gronwall(big, z, 0.1, 1.0);
    FAIL("violation not reported");
  } catch (const HypothesisViolated& e) {
    CHECK(e.first_failing() == 0);
  }
}

TEST_CASE("continuous dependence: identical data and preconditions") {
  const Grid g = Grid::line(1.0, 31, Boundary::Dirichlet0);
  const Model m{EllipticOperator::linear(g), Potential::double_well(), MonotoneGraph::identity()};
  SchemeConfig cfg;
  cfg.tau = 1e-2;
  cfg.T = 0.3;
  const DependenceReport same = continuous_dependence(m, cfg, sine(g), sine(g));
  CHECK(same.identical);
  for (double r : same.ratio) CHECK(r == 0.0);

  const Model pl{EllipticOperator::p_laplace(g, 3.0), Potential::double_well(), MonotoneGraph::identity()};
  CHECK_THROWS_AS(continuous_dependence(pl, cfg, sine(g), sine(g)), PreconditionError);
}

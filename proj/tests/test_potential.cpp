#include <cmath>
#include <random>

#include "doctest.h"
#include "dnp/errors.hpp"
#include "dnp/potential.hpp"

using dnp::Potential;

TEST_CASE("w_eval catalog values") {
  const auto dw = Potential::double_well();
  CHECK(dnp::w_eval(dw, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dnp::w_eval(dw, 0.0) == doctest::Approx(0.25));
  CHECK(dnp::w_eval(Potential::logarithmic(), 0.0) == 0.0);
}

TEST_CASE("w_prime shifts the graph by -lambda r") {
  const auto dw = Potential::double_well();
  CHECK(dnp::w_prime(dw, 1.0).lo == doctest::Approx(0.0));
  CHECK(dnp::w_prime(dw, 0.5).lo == doctest::Approx(-0.375));
  CHECK(dnp::w_prime(dw, 0.5).hi == doctest::Approx(-0.375));
  // c ((1 - r)^-2 - 1) at 0.9 is 99: one below the pure power c / (1 - r)^2
  const auto sp = Potential::singular_power(2.0, 1.0, 0.0);
  CHECK(dnp::w_prime(sp, 0.9).lo == doctest::Approx(99.0));
  CHECK(dnp::w_prime(sp, 0.9).lo >= sp.upper_singularity->c / (0.1 * 0.1));
}

TEST_CASE("coercivity validator") {
  auto dw = Potential::double_well();
  dw.eta = 0.5;
  CHECK(dnp::validate_coercivity(dw, 1000).pass);

  auto concave = Potential::quadratic();
  concave.lambda = 2.0;
  const auto r = dnp::validate_coercivity(concave, 1000);
  CHECK_FALSE(r.pass);
  CHECK(r.growth_margin < 0.0);

  const auto bounded = dnp::validate_coercivity(Potential::logarithmic(), 1000);
  CHECK(bounded.pass);
  CHECK(bounded.growth_vacuous);
  for (const auto& p : {Potential::singular_power(2.0), Potential::half_line_obstacle()}) {
    CAPTURE(p.name);
    CHECK(dnp::validate_coercivity(p, 1000).pass);
  }
}

TEST_CASE("separation compatibility") {
  CHECK(dnp::validate_separation_compatibility(Potential::singular_power(2.0), 0.5, 1));
  CHECK_FALSE(dnp::validate_separation_compatibility(Potential::singular_power(1.0), 0.4, 2));
  CHECK_THROWS_AS(dnp::validate_separation_compatibility(Potential::logarithmic(), 0.5, 1),
                  dnp::MissingMetadata);
}

TEST_CASE("singular_power barrier lower bound on (r1, rbar)") {
  const auto sp = Potential::singular_power(2.0, 1.0);
  const auto& s = *sp.upper_singularity;
  for (int k = 1; k < 200; ++k) {
    const double r = s.onset + (1.0 - s.onset) * k / 200.0;
    CHECK(sp.beta.minimal_section(r) >= s.c / std::pow(1.0 - r, s.kappa));
  }
}

TEST_CASE("w_prime is the derivative of w_eval") {
  for (const auto& p : {Potential::double_well(), Potential::logarithmic(), Potential::singular_power(2.0)}) {
    CAPTURE(p.name);
    for (double r : {-0.7, -0.2, 0.3, 0.8}) {
      const double h = 1e-5;
      const double fd = (dnp::w_eval(p, r + h) - dnp::w_eval(p, r - h)) / (2 * h);
      CHECK(fd == doctest::Approx(dnp::w_prime0(p, r)).epsilon(1e-6));
    }
  }
}

TEST_CASE("lambda-convexity and the double-well minimizers") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto dw = Potential::double_well();
  auto conv = [&](double r) { return dnp::w_eval(dw, r) + 0.5 * dw.lambda * r * r; };
  for (int k = 0; k < 300; ++k) {
    const double a = u(rng), b = u(rng);
    CHECK(conv(0.5 * (a + b)) <= 0.5 * (conv(a) + conv(b)) + 1e-12);
  }
  double best = dnp::kInf;
  std::vector<double> argmin;
  for (int k = -2000; k <= 2000; ++k) {
    const double r = k / 1000.0;
    const double w = dnp::w_eval(dw, r);
    if (w < best - 1e-15) {
      best = w;
      argmin = {r};
    } else if (std::abs(w - best) <= 1e-15) {
      argmin.push_back(r);
    }
  }
  CHECK(best == doctest::Approx(0.0).epsilon(1e-14));
  REQUIRE(argmin.size() == 2);
  CHECK(argmin[0] == -1.0);
  CHECK(argmin[1] == 1.0);
}

TEST_CASE("analytic window sign margin holds for the double well") {
  const auto dw = Potential::double_well();
  REQUIRE(dw.analytic_window.has_value());
  const auto& w = *dw.analytic_window;
  for (double r : dnp::barrier_samples(dw.beta, 1000)) {
    if (r <= w.lo) CHECK(dnp::w_prime(dw, r).hi + w.margin < 0.0);
    if (r >= w.hi) CHECK(dnp::w_prime(dw, r).lo - w.margin > 0.0);
  }
}

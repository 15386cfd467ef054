#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "dnp/errors.hpp"
#include "dnp/spatial.hpp"

using namespace dnp;

namespace {

Eigen::VectorXd random_field(const Grid& g, std::uint64_t seed, bool dirichlet) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) {
    v[static_cast<Eigen::Index>(j)] = dirichlet && g.on_boundary(j) ? 0.0 : u(rng);
  }
  return v;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS(Grid::line(1.0, 2, Boundary::Dirichlet0));
  CHECK_THROWS(Grid::line(-1.0, 11, Boundary::Dirichlet0));
  const Grid g = Grid::line(2.0, 11, Boundary::Neumann0);
  CHECK(g.h(0) == doctest::Approx(0.2));
  CHECK(g.size() == 11);
}

TEST_CASE("apply_b on quadratics and the sine eigenfunction") {
  const Grid g = Grid::line(1.0, 101, Boundary::Dirichlet0);
  const auto op = EllipticOperator::linear(g);
  const Field u = sample(g, [](double x, double) { return x * (1 - x); });
  const Eigen::VectorXd bu = apply_b(op, u).values;
  for (std::size_t j = 1; j + 1 < g.size(); ++j) CHECK(bu[static_cast<Eigen::Index>(j)] == doctest::Approx(2.0).epsilon(1e-10));

  const Field s = sample(g, [](double x, double) { return std::sin(M_PI * x); });
  const Eigen::VectorXd bs = apply_b(op, s).values;
  const double h = g.h(0);
  double err = 0.0;
  for (std::size_t j = 1; j + 1 < g.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    err = std::max(err, std::abs(bs[k] - M_PI * M_PI * s.values[k]));
  }
  CHECK(err <= std::pow(M_PI, 4) / 12 * h * h * 1.01);

  const Grid gn = Grid::line(1.0, 21, Boundary::Neumann0);
  const auto pl = EllipticOperator::p_laplace(gn, 4.0);
  const Eigen::VectorXd bl = apply_b(pl, sample(gn, [](double x, double) { return x; })).values;
  for (std::size_t j = 1; j + 1 < gn.size(); ++j) CHECK(std::abs(bl[static_cast<Eigen::Index>(j)]) < 1e-10);
}

TEST_CASE("2D quadratic gives the exact five-point value") {
  const Grid g = Grid::square(1.0, 1.0, 21, 21, Boundary::Dirichlet0);
  const auto op = EllipticOperator::linear(g);
  const Field u = sample(g, [](double x, double y) { return x * (1 - x) + y * (1 - y); });
  const Eigen::VectorXd bu = apply_b(op, u).values;
  for (int k = 1; k < 20; ++k) {
    for (int i = 1; i < 20; ++i) CHECK(bu[static_cast<Eigen::Index>(g.index(i, k))] == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("phi_energy and b_form examples") {
  const Grid g = Grid::line(1.0, 41, Boundary::Neumann0);
  const Field x = sample(g, [](double x, double) { return x; });
  CHECK(phi_energy(EllipticOperator::linear(g), x) == doctest::Approx(0.5));
  CHECK(phi_energy(EllipticOperator::p_laplace(g, 4.0), x) == doctest::Approx(0.25));
  CHECK(phi_energy(EllipticOperator::linear(g), Field{Eigen::VectorXd::Zero(41), 0}) == 0.0);

  const Grid gd = Grid::line(1.0, 201, Boundary::Dirichlet0);
  const auto op = EllipticOperator::linear(gd);
  const Field q = sample(gd, [](double x, double) { return x * (1 - x); });
  CHECK(b_form(op, q, q) == doctest::Approx(2 * phi_energy(op, q)).epsilon(1e-14));
  CHECK(b_form(op, q, Field{Eigen::VectorXd::Zero(201), 0}) == 0.0);
  const double h = gd.h(0);
  CHECK(std::abs(b_form(op, q, q) - 1.0 / 3.0) <= h * h);
}

TEST_CASE("linearization stencils") {
  const Grid g = Grid::line(1.0, 5, Boundary::Dirichlet0);
  const Field zero{Eigen::VectorXd::Zero(5), 0.0};
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_linearization(EllipticOperator::linear(g), zero).scaled());
  const double h2 = 1.0 / (0.25 * 0.25);
  REQUIRE(a.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a(i, i) == doctest::Approx(2 * h2));
    if (i > 0) CHECK(a(i, i - 1) == doctest::Approx(-h2));
    if (i < 2) CHECK(a(i, i + 1) == doctest::Approx(-h2));
  }
  const Eigen::MatrixXd p2 =
      Eigen::MatrixXd(assemble_linearization(EllipticOperator::p_laplace(g, 2.0), zero).scaled());
  CHECK((p2 - a).cwiseAbs().maxCoeff() < 1e-9 * h2);

  const Grid gn = Grid::line(1.0, 5, Boundary::Neumann0);
  const Field x = sample(gn, [](double x, double) { return x; });
  const Eigen::MatrixXd k4 =
      Eigen::MatrixXd(assemble_linearization(EllipticOperator::p_laplace(gn, 4.0), x).stiffness);
  const Eigen::MatrixXd k2 = Eigen::MatrixXd(assemble_linearization(EllipticOperator::linear(gn), x).stiffness);
  CHECK((k4 - 3.0 * k2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("symmetry, gradient consistency, monotonicity, coercivity") {
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::line(1.0, 41, Boundary::Dirichlet0)
                            : Grid::square(1.0, 1.0, 13, 13, Boundary::Dirichlet0);
    const auto lin = EllipticOperator::linear(g, {2.0, 0.5, 1.0}, 0.0);
    const auto pl = EllipticOperator::p_laplace(g, 3.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Field u{random_field(g, seed, true), 0};
      const Field z{random_field(g, seed + 100, true), 0};
      CHECK(b_form(lin, u, z) == doctest::Approx(b_form(lin, z, u)).epsilon(1e-13));
      CHECK(b_form(lin, u, u) >= lin.ellipticity() * grad_norm_sq(lin, u) * (1 - 1e-12));
      for (const auto* op : {&lin, &pl}) {
        const double step = 1e-5;
        const Field up{u.values + step * z.values, 0};
        const Field um{u.values - step * z.values, 0};
        const double fd = (phi_energy(*op, up) - phi_energy(*op, um)) / (2 * step);
        const double ex = h_inner(*op, apply_b(*op, u).values, z.values);
        CHECK(fd == doctest::Approx(ex).epsilon(1e-7));
        const Eigen::VectorXd d = apply_b(*op, u).values - apply_b(*op, z).values;
        CHECK(h_inner(*op, d, u.values - z.values) >= -1e-10);
      }
    }
  }
}

TEST_CASE("operator errors and tensor files") {
  const Grid g = Grid::square(1.0, 1.0, 5, 5, Boundary::Neumann0);
  try {
    EllipticOperator::linear(g, {1.0, 2.0, 1.0}, 0.0);
    FAIL("indefinite tensor accepted");
  } catch (const ValidationError& e) {
    CHECK(e.tag() == "H6");
  }
  try {
    EllipticOperator::p_laplace(g, 1.0);
    FAIL("p = 1 accepted");
  } catch (const ValidationError& e) {
    CHECK(e.tag() == "H3");
  }
  CHECK(EllipticOperator::p_laplace(g, 1.5).p_above_six_fifths());
  CHECK_FALSE(EllipticOperator::p_laplace(g, 1.1).p_above_six_fifths());

  const std::string path = "tensor_asym.csv";
  {
    std::ofstream out(path);
    out << "dxx,dxy,dyx,dyy\n";
    for (int k = 0; k < 25; ++k) out << "1,0.1,0.2,1\n";
  }
  CHECK_THROWS_AS(load_tensor_csv(path, g), ValidationError);
  CHECK_THROWS_AS(apply_b(EllipticOperator::linear(g), Field{Eigen::VectorXd::Zero(7), 0}), ShapeError);
}

TEST_CASE("dual norm against the closed form for a cosine mode") {
  // Neumann eigenfunction cos(pi x): ||v||_* = |v|_H / sqrt(1 + pi^2)
  const Grid g = Grid::line(1.0, 401, Boundary::Neumann0);
  const auto op = EllipticOperator::linear(g);
  const Eigen::VectorXd v = sample(g, [](double x, double) { return std::cos(M_PI * x); }).values;
  CHECK(vstar_norm(op, v) == doctest::Approx(h_norm(op, v) / std::sqrt(1 + M_PI * M_PI)).epsilon(1e-3));
}

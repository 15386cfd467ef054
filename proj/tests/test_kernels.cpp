#include <omp.h>

#include <cmath>
#include <random>
#include <span>

#include "doctest.h"
#include "dnp/kernels.hpp"
#include "dnp/spatial.hpp"

using namespace dnp;

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST_CASE("omp kernels reproduce the serial reference bit for bit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const std::vector<EllipticOperator> ops{
      EllipticOperator::linear(Grid::line(1.0, 301, Boundary::Neumann0)),
      EllipticOperator::p_laplace(Grid::line(1.0, 301, Boundary::Dirichlet0), 1.5),
      EllipticOperator::linear(Grid::square(1.0, 2.0, 31, 47, Boundary::Dirichlet0), {1.5, 0.3, 0.8}),
      EllipticOperator::p_laplace(Grid::square(1.0, 1.0, 40, 40, Boundary::Neumann0), 3.0)};
  for (const auto& op : ops) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(op.grid().size()));
    Eigen::VectorXd z(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      u[j] = d(rng);
      z[j] = d(rng);
    }
    Eigen::VectorXd gs(u.size()), go(u.size());
    for (int threads : {1, 2, 4, 7}) {
      omp_set_num_threads(threads);
      kernels::serial::energy_gradient(op.mesh(), op.law(), view(u), {gs.data(), static_cast<std::size_t>(gs.size())});
      kernels::omp::energy_gradient(op.mesh(), op.law(), view(u), {go.data(), static_cast<std::size_t>(go.size())});
      CHECK((gs - go).cwiseAbs().maxCoeff() == 0.0);
      CHECK(kernels::serial::energy(op.mesh(), op.law(), view(u)) ==
            kernels::omp::energy(op.mesh(), op.law(), view(u)));
      CHECK(kernels::serial::pairing(op.mesh(), op.law(), view(u), view(z)) ==
            kernels::omp::pairing(op.mesh(), op.law(), view(u), view(z)));
    }
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("nodal maps agree") {
  Eigen::VectorXd in = Eigen::VectorXd::LinSpaced(1000, -2.0, 2.0);
  Eigen::VectorXd a(in.size()), b(in.size());
  auto f = [](std::size_t j, double x) { return std::tanh(x) + 1e-3 * static_cast<double>(j); };
  kernels::serial::nodal_map(view(in), {a.data(), 1000}, f);
  kernels::omp::nodal_map(view(in), {b.data(), 1000}, f);
  CHECK(a == b);
}

TEST_CASE("element gradient is exact on affine data") {
  const Grid g = Grid::square(1.0, 1.0, 6, 6, Boundary::Neumann0);
  const auto op = EllipticOperator::linear(g);
  const Eigen::VectorXd u = sample(g, [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; }).values;
  for (const auto& el : op.mesh().elements) {
    const auto gr = kernels::element_gradient(el, 2, view(u));
    CHECK(gr[0] == doctest::Approx(2.0));
    CHECK(gr[1] == doctest::Approx(-3.0));
  }
}

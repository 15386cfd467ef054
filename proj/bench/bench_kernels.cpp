#include <benchmark/benchmark.h>

#include <cmath>

#include "dnp/kernels.hpp"
#include "dnp/spatial.hpp"

namespace {

dnp::EllipticOperator make_op(int n, bool plap) {
  const dnp::Grid g = dnp::Grid::square(1.0, 1.0, n, n, dnp::Boundary::Dirichlet0);
  return plap ? dnp::EllipticOperator::p_laplace(g, 3.0) : dnp::EllipticOperator::linear(g);
}

Eigen::VectorXd field(const dnp::EllipticOperator& op) {
  return dnp::sample(op.grid(), [](double x, double y) {
           return std::sin(M_PI * x) * std::sin(2 * M_PI * y) + 0.3 * x * y;
         }).values;
}

template <bool Omp>
void BM_gradient(benchmark::State& st) {
  const auto op = make_op(static_cast<int>(st.range(0)), st.range(1) != 0);
  const Eigen::VectorXd u = field(op);
  Eigen::VectorXd out(u.size());
  const std::span<const double> in(u.data(), static_cast<std::size_t>(u.size()));
  const std::span<double> res(out.data(), static_cast<std::size_t>(out.size()));
  for (auto _ : st) {
    if constexpr (Omp) {
      dnp::kernels::omp::energy_gradient(op.mesh(), op.law(), in, res);
    } else {
      dnp::kernels::serial::energy_gradient(op.mesh(), op.law(), in, res);
    }
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * u.size());
}

template <bool Omp>
void BM_energy(benchmark::State& st) {
  const auto op = make_op(static_cast<int>(st.range(0)), st.range(1) != 0);
  const Eigen::VectorXd u = field(op);
  const std::span<const double> in(u.data(), static_cast<std::size_t>(u.size()));
  for (auto _ : st) {
    double e = Omp ? dnp::kernels::omp::energy(op.mesh(), op.law(), in)
                   : dnp::kernels::serial::energy(op.mesh(), op.law(), in);
    benchmark::DoNotOptimize(e);
  }
  st.SetItemsProcessed(st.iterations() * u.size());
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {65, 257, 513}) {
    for (int plap : {0, 1}) b->Args({n, plap});
  }
}

}  // namespace

BENCHMARK(BM_gradient<false>)->Apply(sizes)->Name("gradient/serial");
BENCHMARK(BM_gradient<true>)->Apply(sizes)->Name("gradient/omp");
BENCHMARK(BM_energy<false>)->Apply(sizes)->Name("energy/serial");
BENCHMARK(BM_energy<true>)->Apply(sizes)->Name("energy/omp");

BENCHMARK_MAIN();

#pragma once

// Data-parallel kernels on the finite-difference mesh. Every kernel has a
// plain serial reference in `serial::` and an OpenMP version in `omp::`; the
// library uses the OpenMP versions, tests compare the two, and the benchmark
// target times them side by side.
//
// The OpenMP versions never reduce across threads: element work is written to
// per-element buffers and nodal sums are gathered in a fixed order, so results
// do not depend on the thread count.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dnp::kernels {

/// Symmetric 2x2 matrix (xx, xy, yy); in 1D only xx is used.
struct Sym2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;
};

/// Linear simplices: intervals in 1D, right triangles in 2D.
struct Element {
  std::array<int, 3> nodes{};
  int n_nodes = 2;
  double measure = 0.0;
  /// grad[c][k]: derivative along axis c of the k-th local hat function.
  std::array<std::array<double, 3>, 2> grad{};
};

struct Mesh {
  int dim = 1;
  std::size_t n_nodes = 0;
  std::vector<Element> elements;
  /// CSR node -> (element, local index) adjacency for gathers.
  std::vector<std::size_t> adj_offsets;
  std::vector<std::pair<int, int>> adj;
  /// Lumped mass (area / n_nodes share of each element).
  std::vector<double> mass;
};

/// Flux law b = grad_xi phi: linear with per-element tensor D, or p-Laplacian.
struct FluxLaw {
  enum class Kind { Linear, PLaplace };
  Kind kind = Kind::Linear;
  double p = 2.0;
  std::vector<Sym2> tensor;  // one per element (Linear only)
};

double energy_density(const FluxLaw& law, std::size_t e, const std::array<double, 2>& g, int dim);
std::array<double, 2> flux(const FluxLaw& law, std::size_t e, const std::array<double, 2>& g,
                           int dim);
std::array<double, 2> element_gradient(const Element& el, int dim, std::span<const double> u);

namespace serial {
/// out = gradient of the discrete energy (unscaled by the mass).
void energy_gradient(const Mesh& m, const FluxLaw& law, std::span<const double> u,
                     std::span<double> out);
double energy(const Mesh& m, const FluxLaw& law, std::span<const double> u);
double pairing(const Mesh& m, const FluxLaw& law, std::span<const double> u,
               std::span<const double> z);

template <class F>
void nodal_map(std::span<const double> in, std::span<double> out, F&& f) {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = f(j, in[j]);
}
}  // namespace serial

namespace omp {
void energy_gradient(const Mesh& m, const FluxLaw& law, std::span<const double> u,
                     std::span<double> out);
double energy(const Mesh& m, const FluxLaw& law, std::span<const double> u);
double pairing(const Mesh& m, const FluxLaw& law, std::span<const double> u,
               std::span<const double> z);

template <class F>
void nodal_map(std::span<const double> in, std::span<double> out, F&& f) {
  const auto n = static_cast<long>(in.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = f(static_cast<std::size_t>(j), in[static_cast<std::size_t>(j)]);
  }
}
}  // namespace omp

}  // namespace dnp::kernels

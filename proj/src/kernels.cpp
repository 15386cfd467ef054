#include "dnp/kernels.hpp"

#include <cmath>

namespace dnp::kernels {

std::array<double, 2> element_gradient(const Element& el, int dim, std::span<const double> u) {
  std::array<double, 2> g{0.0, 0.0};
  for (int c = 0; c < dim; ++c) {
    double s = 0.0;
    for (int k = 0; k < el.n_nodes; ++k) {
      s += el.grad[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] *
           u[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(k)])];
    }
    g[static_cast<std::size_t>(c)] = s;
  }
  return g;
}

double energy_density(const FluxLaw& law, std::size_t e, const std::array<double, 2>& g, int dim) {
  if (law.kind == FluxLaw::Kind::Linear) {
    const Sym2& d = law.tensor[e];
    if (dim == 1) return 0.5 * d.xx * g[0] * g[0];
    return 0.5 * (d.xx * g[0] * g[0] + 2.0 * d.xy * g[0] * g[1] + d.yy * g[1] * g[1]);
  }
  const double n2 = g[0] * g[0] + (dim == 2 ? g[1] * g[1] : 0.0);
  if (n2 == 0.0) return 0.0;
  return std::pow(n2, 0.5 * law.p) / law.p;
}

std::array<double, 2> flux(const FluxLaw& law, std::size_t e, const std::array<double, 2>& g,
                           int dim) {
  if (law.kind == FluxLaw::Kind::Linear) {
    const Sym2& d = law.tensor[e];
    if (dim == 1) return {d.xx * g[0], 0.0};
    return {d.xx * g[0] + d.xy * g[1], d.xy * g[0] + d.yy * g[1]};
  }
  const double n2 = g[0] * g[0] + (dim == 2 ? g[1] * g[1] : 0.0);
  if (n2 == 0.0) return {0.0, 0.0};
  const double w = std::pow(n2, 0.5 * (law.p - 2.0));
  return {w * g[0], w * g[1]};
}

namespace {

double element_pairing(const Element& el, const std::array<double, 2>& b, int dim, int k) {
  double s = 0.0;
  for (int c = 0; c < dim; ++c) {
    s += b[static_cast<std::size_t>(c)] *
         el.grad[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
  }
  return el.measure * s;
}

}  // namespace

namespace serial {

void energy_gradient(const Mesh& m, const FluxLaw& law, std::span<const double> u,
                     std::span<double> out) {
  for (auto& v : out) v = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const Element& el = m.elements[e];
    const auto b = flux(law, e, element_gradient(el, m.dim, u), m.dim);
    for (int k = 0; k < el.n_nodes; ++k) {
      out[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(k)])] +=
          element_pairing(el, b, m.dim, k);
    }
  }
}

double energy(const Mesh& m, const FluxLaw& law, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const Element& el = m.elements[e];
    s += el.measure * energy_density(law, e, element_gradient(el, m.dim, u), m.dim);
  }
  return s;
}

double pairing(const Mesh& m, const FluxLaw& law, std::span<const double> u,
               std::span<const double> z) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const Element& el = m.elements[e];
    const auto b = flux(law, e, element_gradient(el, m.dim, u), m.dim);
    const auto gz = element_gradient(el, m.dim, z);
    s += el.measure * (b[0] * gz[0] + b[1] * gz[1]);
  }
  return s;
}

}  // namespace serial

namespace omp {

void energy_gradient(const Mesh& m, const FluxLaw& law, std::span<const double> u,
                     std::span<double> out) {
  const auto ne = static_cast<long>(m.elements.size());
  std::vector<std::array<double, 2>> fluxes(m.elements.size());
#pragma omp parallel for schedule(static)
  for (long e = 0; e < ne; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    fluxes[ue] = flux(law, ue, element_gradient(m.elements[ue], m.dim, u), m.dim);
  }
  const auto nn = static_cast<long>(m.n_nodes);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nn; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    double s = 0.0;
    for (std::size_t a = m.adj_offsets[uj]; a < m.adj_offsets[uj + 1]; ++a) {
      const auto [e, k] = m.adj[a];
      s += element_pairing(m.elements[static_cast<std::size_t>(e)],
                           fluxes[static_cast<std::size_t>(e)], m.dim, k);
    }
    out[uj] = s;
  }
}

double energy(const Mesh& m, const FluxLaw& law, std::span<const double> u) {
  const auto ne = static_cast<long>(m.elements.size());
  std::vector<double> part(m.elements.size());
#pragma omp parallel for schedule(static)
  for (long e = 0; e < ne; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    const Element& el = m.elements[ue];
    part[ue] = el.measure * energy_density(law, ue, element_gradient(el, m.dim, u), m.dim);
  }
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

double pairing(const Mesh& m, const FluxLaw& law, std::span<const double> u,
               std::span<const double> z) {
  const auto ne = static_cast<long>(m.elements.size());
  std::vector<double> part(m.elements.size());
#pragma omp parallel for schedule(static)
  for (long e = 0; e < ne; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    const Element& el = m.elements[ue];
    const auto b = flux(law, ue, element_gradient(el, m.dim, u), m.dim);
    const auto gz = element_gradient(el, m.dim, z);
    part[ue] = el.measure * (b[0] * gz[0] + b[1] * gz[1]);
  }
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

}  // namespace omp

}  // namespace dnp::kernels

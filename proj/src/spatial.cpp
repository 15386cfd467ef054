#include "dnp/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<double> view(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

kernels::Element interval(int a, int b, double h) {
  kernels::Element e;
  e.n_nodes = 2;
  e.nodes = {a, b, 0};
  e.measure = h;
  e.grad[0] = {-1.0 / h, 1.0 / h, 0.0};
  return e;
}

kernels::Element triangle(std::array<int, 3> nodes, double hx, double hy,
                          std::array<double, 3> gx, std::array<double, 3> gy) {
  kernels::Element e;
  e.n_nodes = 3;
  e.nodes = nodes;
  e.measure = 0.5 * hx * hy;
  for (int k = 0; k < 3; ++k) {
    e.grad[0][static_cast<std::size_t>(k)] = gx[static_cast<std::size_t>(k)] / hx;
    e.grad[1][static_cast<std::size_t>(k)] = gy[static_cast<std::size_t>(k)] / hy;
  }
  return e;
}

kernels::Mesh build_mesh(const Grid& g) {
  kernels::Mesh m;
  m.dim = g.dim;
  m.n_nodes = g.size();
  if (g.dim == 1) {
    const double h = g.h(0);
    for (int i = 0; i + 1 < g.n[0]; ++i) m.elements.push_back(interval(i, i + 1, h));
  } else {
    const double hx = g.h(0);
    const double hy = g.h(1);
    for (int k = 0; k + 1 < g.n[1]; ++k) {
      for (int i = 0; i + 1 < g.n[0]; ++i) {
        const int a = static_cast<int>(g.index(i, k));
        const int b = static_cast<int>(g.index(i + 1, k));
        const int c = static_cast<int>(g.index(i, k + 1));
        const int d = static_cast<int>(g.index(i + 1, k + 1));
        m.elements.push_back(triangle({a, b, c}, hx, hy, {-1, 1, 0}, {-1, 0, 1}));
        m.elements.push_back(triangle({d, c, b}, hx, hy, {1, -1, 0}, {1, 0, -1}));
      }
    }
  }
  m.mass.assign(m.n_nodes, 0.0);
  std::vector<std::size_t> count(m.n_nodes, 0);
  for (const auto& e : m.elements) {
    for (int k = 0; k < e.n_nodes; ++k) {
      const auto j = static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(k)]);
      m.mass[j] += e.measure / e.n_nodes;
      ++count[j];
    }
  }
  m.adj_offsets.assign(m.n_nodes + 1, 0);
  for (std::size_t j = 0; j < m.n_nodes; ++j) m.adj_offsets[j + 1] = m.adj_offsets[j] + count[j];
  m.adj.resize(m.adj_offsets.back());
  std::vector<std::size_t> fill(m.adj_offsets.begin(), m.adj_offsets.end() - 1);
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const auto& el = m.elements[e];
    for (int k = 0; k < el.n_nodes; ++k) {
      const auto j = static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(k)]);
      m.adj[fill[j]++] = {static_cast<int>(e), k};
    }
  }
  return m;
}

double min_eigen(const kernels::Sym2& d, int dim) {
  if (dim == 1) return d.xx;
  const double tr = d.xx + d.yy;
  const double disc = std::sqrt(0.25 * (d.xx - d.yy) * (d.xx - d.yy) + d.xy * d.xy);
  return 0.5 * tr - disc;
}

double max_eigen(const kernels::Sym2& d, int dim) {
  if (dim == 1) return d.xx;
  const double tr = d.xx + d.yy;
  const double disc = std::sqrt(0.25 * (d.xx - d.yy) * (d.xx - d.yy) + d.xy * d.xy);
  return 0.5 * tr + disc;
}

}  // namespace

Grid::Grid(int dim_, std::array<double, 2> length_, std::array<int, 2> n_, Boundary bc_)
    : dim(dim_), length(length_), n(n_), bc(bc_) {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  if (dim == 1) n[1] = 1;
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 3) throw DomainError("grid needs at least 3 nodes per axis");
    if (!(length[a] > 0.0)) throw DomainError("grid extent must be positive");
  }
}

Grid Grid::line(double length, int n, Boundary bc) { return Grid(1, {length, 1.0}, {n, 1}, bc); }

Grid Grid::square(double lx, double ly, int nx, int ny, Boundary bc) {
  return Grid(2, {lx, ly}, {nx, ny}, bc);
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(dim == 2 ? n[1] : 1);
}

std::array<double, 2> Grid::coord(std::size_t j) const {
  const int i = static_cast<int>(j % static_cast<std::size_t>(n[0]));
  const int k = static_cast<int>(j / static_cast<std::size_t>(n[0]));
  return {i * h(0), dim == 2 ? k * h(1) : 0.0};
}

bool Grid::on_boundary(std::size_t j) const {
  const int i = static_cast<int>(j % static_cast<std::size_t>(n[0]));
  const int k = static_cast<int>(j / static_cast<std::size_t>(n[0]));
  if (i == 0 || i == n[0] - 1) return true;
  return dim == 2 && (k == 0 || k == n[1] - 1);
}

bool Grid::operator==(const Grid& o) const {
  return dim == o.dim && n == o.n && length == o.length && bc == o.bc;
}

EllipticOperator::EllipticOperator(const Grid& g, Kind k) : grid_(g), kind_(k) {
  mesh_ = build_mesh(g);
  mass_ = Eigen::Map<const Eigen::VectorXd>(mesh_.mass.data(),
                                            static_cast<Eigen::Index>(mesh_.mass.size()));
  free_.assign(g.size(), true);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.bc == Boundary::Dirichlet0 && g.on_boundary(j)) free_[j] = false;
    if (free_[j]) dofs_.push_back(static_cast<int>(j));
  }
  if (dofs_.empty()) throw DomainError("grid has no interior nodes");
}

EllipticOperator EllipticOperator::linear(const Grid& g, kernels::Sym2 d, double a) {
  return linear_field(g, std::vector<kernels::Sym2>(g.size(), d), a);
}

EllipticOperator EllipticOperator::linear_field(const Grid& g, std::vector<kernels::Sym2> nodal_d,
                                                double a) {
  if (nodal_d.size() != g.size()) throw ShapeError("D field does not match the grid");
  EllipticOperator op(g, Kind::Linear);
  op.law_.kind = kernels::FluxLaw::Kind::Linear;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& d : nodal_d) {
    if (!std::isfinite(d.xx) || !std::isfinite(d.xy) || !std::isfinite(d.yy)) {
      throw DomainError("D field has non-finite entries");
    }
    lo = std::min(lo, min_eigen(d, g.dim));
    hi = std::max(hi, max_eigen(d, g.dim));
  }
  if (!(lo > 0.0)) throw ValidationError("D field is not uniformly elliptic", "H6");
  if (a > 0.0 && lo < a * (1.0 - 1e-12)) {
    throw ValidationError("D xi.xi >= a |xi|^2 fails on the D field", "H6");
  }
  op.a_ = a > 0.0 ? a : lo;
  op.law_.tensor.reserve(op.mesh_.elements.size());
  for (const auto& el : op.mesh_.elements) {
    kernels::Sym2 avg{0.0, 0.0, 0.0};
    for (int k = 0; k < el.n_nodes; ++k) {
      const auto& d = nodal_d[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(k)])];
      avg.xx += d.xx / el.n_nodes;
      avg.xy += d.xy / el.n_nodes;
      avg.yy += d.yy / el.n_nodes;
    }
    op.law_.tensor.push_back(avg);
  }
  op.growth_ = {0.5 * op.a_, 0.0, hi};
  return op;
}

EllipticOperator EllipticOperator::p_laplace(const Grid& g, double p) {
  if (!(p > 1.0)) throw ValidationError("p-Laplacian needs p > 1", "H3");
  EllipticOperator op(g, Kind::PLaplace);
  op.law_.kind = kernels::FluxLaw::Kind::PLaplace;
  op.law_.p = p;
  op.growth_ = {1.0 / p, 0.0, 1.0};
  return op;
}

bool EllipticOperator::isotropic_unit() const {
  if (kind_ != Kind::Linear) return false;
  return std::all_of(law_.tensor.begin(), law_.tensor.end(), [&](const kernels::Sym2& d) {
    return d.xx == 1.0 && (grid_.dim == 1 || (d.xy == 0.0 && d.yy == 1.0));
  });
}

std::vector<kernels::Sym2> load_tensor_csv(const std::string& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open D field file " + path);
  std::vector<kernels::Sym2> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.empty()) continue;
    if (g.dim == 1) {
      if (v.size() != 1) throw ShapeError("1D D field rows need one column");
      out.push_back({v[0], 0.0, 1.0});
    } else {
      if (v.size() != 4) throw ShapeError("2D D field rows need columns dxx,dxy,dyx,dyy");
      if (std::abs(v[1] - v[2]) > 1e-12 * std::max(1.0, std::abs(v[1]))) {
        throw ValidationError("D field is not symmetric at row " + std::to_string(out.size()),
                              "H6");
      }
      out.push_back({v[0], v[1], v[3]});
    }
  }
  if (out.size() != g.size()) throw ShapeError("D field row count does not match the grid");
  return out;
}

void check_conforms(const EllipticOperator& op, const Field& u) {
  if (static_cast<std::size_t>(u.values.size()) != op.grid().size()) {
    throw ShapeError("field has " + std::to_string(u.values.size()) + " values, grid has " +
                     std::to_string(op.grid().size()));
  }
}

Eigen::VectorXd energy_gradient(const EllipticOperator& op, const Field& u) {
  check_conforms(op, u);
  Eigen::VectorXd out(u.values.size());
  kernels::omp::energy_gradient(op.mesh(), op.law(), view(u.values), view(out));
  for (std::size_t j = 0; j < op.free().size(); ++j) {
    if (!op.free()[j]) out[static_cast<Eigen::Index>(j)] = 0.0;
  }
  return out;
}

Field apply_b(const EllipticOperator& op, const Field& u) {
  Eigen::VectorXd g = energy_gradient(op, u);
  return {g.cwiseQuotient(op.mass()), u.t};
}

double phi_energy(const EllipticOperator& op, const Field& u) {
  check_conforms(op, u);
  return kernels::omp::energy(op.mesh(), op.law(), view(u.values));
}

double b_form(const EllipticOperator& op, const Field& u, const Field& z) {
  check_conforms(op, u);
  check_conforms(op, z);
  return kernels::omp::pairing(op.mesh(), op.law(), view(u.values), view(z.values));
}

double grad_norm_sq(const EllipticOperator& op, const Field& u) {
  check_conforms(op, u);
  double s = 0.0;
  for (const auto& el : op.mesh().elements) {
    const auto g = kernels::element_gradient(el, op.grid().dim, view(u.values));
    s += el.measure * (g[0] * g[0] + g[1] * g[1]);
  }
  return s;
}

Eigen::SparseMatrix<double> Linearization::reduced() const {
  std::vector<int> pos(static_cast<std::size_t>(stiffness.rows()), -1);
  for (std::size_t k = 0; k < dofs.size(); ++k) pos[static_cast<std::size_t>(dofs[k])] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < stiffness.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, c); it; ++it) {
      const int r = pos[static_cast<std::size_t>(it.row())];
      const int cc = pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && cc >= 0) t.emplace_back(r, cc, it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(dofs.size());
  Eigen::SparseMatrix<double> out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Eigen::SparseMatrix<double> Linearization::scaled() const {
  Eigen::SparseMatrix<double> k = reduced();
  Eigen::VectorXd inv(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    inv[static_cast<Eigen::Index>(i)] = 1.0 / mass[dofs[i]];
  }
  return inv.asDiagonal() * k;
}

Linearization assemble_linearization(const EllipticOperator& op, const Field& u) {
  check_conforms(op, u);
  const auto& mesh = op.mesh();
  const int dim = mesh.dim;
  const auto ne = static_cast<long>(mesh.elements.size());
  std::vector<std::array<double, 9>> local(mesh.elements.size());
  std::vector<char> degenerate(mesh.elements.size(), 0);
  const auto uv = view(u.values);
  const auto& law = op.law();

#pragma omp parallel for schedule(static)
  for (long e = 0; e < ne; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    const auto& el = mesh.elements[ue];
    double hxx, hxy, hyy;
    if (law.kind == kernels::FluxLaw::Kind::Linear) {
      hxx = law.tensor[ue].xx;
      hxy = law.tensor[ue].xy;
      hyy = law.tensor[ue].yy;
    } else {
      const auto g = kernels::element_gradient(el, dim, uv);
      const double n2 = g[0] * g[0] + (dim == 2 ? g[1] * g[1] : 0.0);
      const double floor2 = EllipticOperator::kGradFloor * EllipticOperator::kGradFloor;
      if (law.p < 2.0 && n2 < floor2) degenerate[ue] = 1;
      const double r2 = n2 + floor2;
      const double w = std::pow(r2, 0.5 * (law.p - 2.0));
      const double c = (law.p - 2.0) / r2;
      hxx = w * (1.0 + c * g[0] * g[0]);
      hxy = w * c * g[0] * g[1];
      hyy = w * (1.0 + c * g[1] * g[1]);
    }
    auto& loc = local[ue];
    for (int a = 0; a < el.n_nodes; ++a) {
      for (int b = 0; b < el.n_nodes; ++b) {
        const auto sa = static_cast<std::size_t>(a);
        const auto sb = static_cast<std::size_t>(b);
        double v = hxx * el.grad[0][sa] * el.grad[0][sb];
        if (dim == 2) {
          v += hxy * (el.grad[0][sa] * el.grad[1][sb] + el.grad[1][sa] * el.grad[0][sb]) +
               hyy * el.grad[1][sa] * el.grad[1][sb];
        }
        loc[static_cast<std::size_t>(3 * a + b)] = el.measure * v;
      }
    }
  }

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(mesh.elements.size() * 9);
  Linearization lin;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    for (int a = 0; a < el.n_nodes; ++a) {
      for (int b = 0; b < el.n_nodes; ++b) {
        t.emplace_back(el.nodes[static_cast<std::size_t>(a)], el.nodes[static_cast<std::size_t>(b)],
                       local[e][static_cast<std::size_t>(3 * a + b)]);
      }
    }
    lin.degenerate_cells += degenerate[e];
  }
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes);
  lin.stiffness.resize(n, n);
  lin.stiffness.setFromTriplets(t.begin(), t.end());
  lin.mass = op.mass();
  lin.dofs = op.dofs();
  return lin;
}

double h_inner(const EllipticOperator& op, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return (op.mass().array() * u.array() * v.array()).sum();
}

double h_norm(const EllipticOperator& op, const Eigen::VectorXd& u) {
  return std::sqrt(std::max(0.0, h_inner(op, u, u)));
}

double sup_norm(const Eigen::VectorXd& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

DualNorm::DualNorm(const Grid& g) {
  const EllipticOperator lap = EllipticOperator::linear(g);
  const Linearization lin = assemble_linearization(lap, Field{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())), 0.0});
  Eigen::SparseMatrix<double> a = lin.stiffness;
  for (Eigen::Index j = 0; j < a.rows(); ++j) a.coeffRef(j, j) += lin.mass[j];
  mass_ = lin.mass;
  solver_.compute(a);
  if (solver_.info() != Eigen::Success) throw ConvergenceError("dual norm factorization failed");
}

double DualNorm::operator()(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd mv = mass_.cwiseProduct(v);
  const Eigen::VectorXd y = solver_.solve(mv);
  return std::sqrt(std::max(0.0, mv.dot(y)));
}

double vstar_norm(const EllipticOperator& op, const Eigen::VectorXd& v) {
  return DualNorm(op.grid())(v);
}

}  // namespace dnp

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

#include "dnp/kernels.hpp"

namespace dnp {

enum class Boundary { Dirichlet0, Neumann0 };

/// Uniform tensor grid on [0, L1] (x [0, L2]); nodes ordered axis-major, x fastest.
struct Grid {
  int dim = 1;
  std::array<double, 2> length{1.0, 1.0};
  std::array<int, 2> n{101, 1};
  Boundary bc = Boundary::Dirichlet0;

  Grid() = default;
  Grid(int dim, std::array<double, 2> length, std::array<int, 2> n, Boundary bc);
  static Grid line(double length, int n, Boundary bc);
  static Grid square(double lx, double ly, int nx, int ny, Boundary bc);

  double h(int axis) const { return length[axis] / (n[axis] - 1); }
  std::size_t size() const;
  std::array<double, 2> coord(std::size_t j) const;
  bool on_boundary(std::size_t j) const;
  std::size_t index(int i, int k = 0) const { return static_cast<std::size_t>(k * n[0] + i); }
  double volume() const { return dim == 1 ? length[0] : length[0] * length[1]; }
  bool operator==(const Grid& o) const;
};

struct Field {
  Eigen::VectorXd values;
  double t = 0.0;
};

/// Nodal samples of a function on the grid.
template <class F>
Field sample(const Grid& g, F&& f, double t = 0.0) {
  Field out{Eigen::VectorXd(static_cast<Eigen::Index>(g.size())), t};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto x = g.coord(j);
    out.values[static_cast<Eigen::Index>(j)] = f(x[0], x[1]);
  }
  return out;
}

/// Growth constants of the flux law, reported only.
struct GrowthConstants {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

/// Discrete divergence-form operator: linear (symmetric D field) or p-Laplacian.
/// Intervals in 1D, each grid square cut into two triangles in 2D, one
/// gradient per cell, lumped mass. apply_b is exactly M^-1 times the gradient
/// of phi_energy.
class EllipticOperator {
 public:
  enum class Kind { Linear, PLaplace };
  static constexpr double kGradFloor = 1e-8;

  static EllipticOperator linear(const Grid& g, kernels::Sym2 d = {}, double a = 0.0);
  /// Nodal D field; ellipticity a is checked (a <= 0 means: use the sampled minimum).
  static EllipticOperator linear_field(const Grid& g, std::vector<kernels::Sym2> nodal_d,
                                       double a = 0.0);
  static EllipticOperator p_laplace(const Grid& g, double p);

  const Grid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  double p() const { return law_.p; }
  double ellipticity() const { return a_; }
  bool p_above_six_fifths() const { return kind_ == Kind::PLaplace && law_.p > 1.2; }
  const GrowthConstants& growth() const { return growth_; }
  const kernels::Mesh& mesh() const { return mesh_; }
  const kernels::FluxLaw& law() const { return law_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  /// Mask of nodes carried as unknowns (all nodes for Neumann).
  const std::vector<bool>& free() const { return free_; }
  const std::vector<int>& dofs() const { return dofs_; }
  bool isotropic_unit() const;

 private:
  EllipticOperator(const Grid& g, Kind k);

  Grid grid_;
  Kind kind_;
  double a_ = 0.0;
  GrowthConstants growth_;
  kernels::Mesh mesh_;
  kernels::FluxLaw law_;
  Eigen::VectorXd mass_;
  std::vector<bool> free_;
  std::vector<int> dofs_;
};

/// Reads a nodal D field: one row per node, columns dxx,dxy,dyx,dyy (2D) or d (1D).
std::vector<kernels::Sym2> load_tensor_csv(const std::string& path, const Grid& g);

/// Gradient of the discrete energy (no mass scaling); zero at Dirichlet nodes.
Eigen::VectorXd energy_gradient(const EllipticOperator& op, const Field& u);
Field apply_b(const EllipticOperator& op, const Field& u);
double phi_energy(const EllipticOperator& op, const Field& u);
double b_form(const EllipticOperator& op, const Field& u, const Field& z);
/// Sum over cells of measure * |grad u|^2.
double grad_norm_sq(const EllipticOperator& op, const Field& u);

struct Linearization {
  /// Hessian of phi_energy over all nodes (symmetric PSD).
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  std::vector<int> dofs;
  int degenerate_cells = 0;

  /// Stiffness restricted to the free dofs.
  Eigen::SparseMatrix<double> reduced() const;
  /// M^-1 K on the free dofs (the matrix of apply_b for a linear law).
  Eigen::SparseMatrix<double> scaled() const;
};

/// p-Laplace: |xi| is regularized by kGradFloor inside the Hessian only.
Linearization assemble_linearization(const EllipticOperator& op, const Field& u);

double h_inner(const EllipticOperator& op, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double h_norm(const EllipticOperator& op, const Eigen::VectorXd& u);
double sup_norm(const Eigen::VectorXd& u);
/// Dual norm of H^1(Omega): sqrt((Mv)^T (K + M)^-1 (Mv)), K the unit Laplacian
/// on all nodes. Factorizes once.
class DualNorm {
 public:
  explicit DualNorm(const Grid& g);
  double operator()(const Eigen::VectorXd& v) const;

 private:
  Eigen::VectorXd mass_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

double vstar_norm(const EllipticOperator& op, const Eigen::VectorXd& v);

void check_conforms(const EllipticOperator& op, const Field& u);

}  // namespace dnp

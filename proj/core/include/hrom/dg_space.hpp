#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "hrom/mesh.hpp"

namespace hrom {

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1); weights sum to 1/2.
struct TriangleRule {
  Eigen::Matrix2Xd points;
  Eigen::VectorXd weights;
  int degree = 0;
};

/// Symmetric rule for degree <= 5, collapsed Gauss-Legendre beyond that.
TriangleRule triangle_rule(int degree);

/// Gauss-Legendre nodes/weights on [0,1]; exact for degree 2n-1.
struct LineRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};
LineRule gauss_legendre_01(int n);

using ScalarField = std::function<double(double, double)>;

/// Block diagonal mass matrix of a dG space: one SPD local block per element.
/// Vectors of length N act blockwise; vectors of length 2N are treated as the
/// stacked [r; s] layout and each half is transformed independently.
class MassMatrix {
 public:
  MassMatrix() = default;
  MassMatrix(std::vector<Eigen::MatrixXd> blocks);

  long dimension() const { return dim_; }
  int block_size() const { return block_size_; }
  const Eigen::MatrixXd& block(int element) const { return blocks_[element]; }
  long block_count() const { return static_cast<long>(blocks_.size()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& x) const;
  /// L^T x and L^{-T} x for the Cholesky factor M = L L^T of each block.
  Eigen::VectorXd apply_cholesky_t(const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve_cholesky_t(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd apply_cholesky_t(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd solve_cholesky_t(const Eigen::MatrixXd& x) const;

  /// sqrt(x^T M x); accepts length N or 2N.
  double weighted_norm(const Eigen::VectorXd& x) const;

  Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse() const;

 private:
  void check_length(long n) const;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
  long dim_ = 0;
  int block_size_ = 0;
};

/// Discontinuous piecewise-polynomial space on a periodic triangulation.
/// Local nodal Lagrange basis of degree q on each triangle; dofs are
/// element-major, N = n_K * n_q.
class DgSpace {
 public:
  explicit DgSpace(const Mesh& mesh, int degree = 1);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int local_dim() const { return local_dim_; }
  long dimension() const { return dimension_; }
  long dof(int element, int local) const {
    return static_cast<long>(element) * local_dim_ + local;
  }

  const TriangleRule& volume_rule() const { return volume_rule_; }
  const LineRule& edge_rule() const { return edge_rule_; }

  /// Basis values / reference gradients tabulated at the volume rule points.
  const Eigen::MatrixXd& basis_table() const { return basis_table_; }
  const Eigen::MatrixXd& grad_xi_table() const { return grad_xi_table_; }
  const Eigen::MatrixXd& grad_eta_table() const { return grad_eta_table_; }

  Eigen::VectorXd basis_at(double xi, double eta) const;
  /// 2 x n_q matrix of reference gradients.
  Eigen::MatrixXd basis_gradient_at(double xi, double eta) const;

  const Eigen::Matrix2d& affine_map(int element) const { return jac_[element]; }
  const Eigen::Matrix2d& inverse_map_t(int element) const { return jac_inv_t_[element]; }
  double map_determinant(int element) const { return det_[element]; }

  Eigen::Vector2d to_physical(int element, double xi, double eta) const;
  /// Inverse affine map; exact for straight triangles.
  Eigen::Vector2d to_reference(int element, const Eigen::Vector2d& x) const;
  bool contains(int element, const Eigen::Vector2d& x, double tol = 1e-10) const;

  /// Reference coordinates of the point at parameter s in [0,1] along local
  /// edge k (from vertex k towards vertex k+1).
  Eigen::Vector2d edge_reference_point(int local_edge, double s) const;

 private:
  const Mesh* mesh_;
  int degree_;
  int local_dim_;
  long dimension_;
  Eigen::MatrixXd coeffs_;  // monomial-to-nodal, column a = basis function a
  std::vector<std::pair<int, int>> exponents_;
  TriangleRule volume_rule_;
  LineRule edge_rule_;
  Eigen::MatrixXd basis_table_, grad_xi_table_, grad_eta_table_;
  std::vector<Eigen::Matrix2d> jac_, jac_inv_t_;
  std::vector<double> det_;
};

MassMatrix assemble_mass_matrix(const DgSpace& space);

/// Orthogonal L2 projection of f onto the space: solves M c = (f, phi_i).
Eigen::VectorXd l2_project(const DgSpace& space, const MassMatrix& mass,
                           const ScalarField& f);

/// Value of the dG expansion at a point inside the hinted element.
double evaluate_field(const DgSpace& space, const Eigen::VectorXd& coefficients,
                      const Eigen::Vector2d& point, int element_hint);

/// Quadrature L2 norm of (field - f) over the mesh.
double l2_error_against(const DgSpace& space, const Eigen::VectorXd& coefficients,
                        const ScalarField& f);

}  // namespace hrom

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "hrom/dg_space.hpp"

namespace hrom {

/// Equation coefficients. `potential` may be empty (V = 0).
struct Physics {
  double alpha = 1.0;
  double beta = 0.0;
  double kappa = 10.0;
  ScalarField potential;
};

/// Counters threaded through nonlinear evaluations; used by the cost tests and
/// the benchmark harness.
struct EvalStats {
  long long full_nonlinear_evals = 0;
  long long sampled_entries = 0;
  long long elements_touched = 0;
};

/// Assembled spatial operators of the interior-penalty discretization: the
/// blockwise mass matrix and the symmetric stiffness matrix of a_h, together
/// with the quadrature data needed to evaluate the cubic term.
class OperatorSet {
 public:
  OperatorSet(const DgSpace& space, Physics physics);

  const DgSpace& space() const { return *space_; }
  const Physics& physics() const { return physics_; }
  const MassMatrix& mass() const { return mass_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& stiffness() const {
    return stiffness_;
  }
  long dimension() const { return space_->dimension(); }
  long state_dimension() const { return 2 * space_->dimension(); }

  /// A applied to each half of the stacked state: [A r; A s].
  Eigen::VectorXd apply_stiffness(const Eigen::VectorXd& z) const;

 private:
  const DgSpace* space_;
  Physics physics_;
  MassMatrix mass_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> stiffness_;
};

/// Stiffness matrix of the bilinear form a_h: volume gradient and potential
/// terms, consistency/symmetry and penalty terms on interior edges and on
/// periodic boundary pairs. kappa must be positive.
Eigen::SparseMatrix<double, Eigen::RowMajor> assemble_stiffness(
    const DgSpace& space, const Physics& physics);

OperatorSet assemble_operators(const DgSpace& space, const Physics& physics);

/// Cubic vector b(z): entries of the forms beta (r^2+s^2) r and beta (r^2+s^2) s
/// tested against the local basis; element-local, no edge contributions.
Eigen::VectorXd nonlinear_vector(const OperatorSet& ops, const Eigen::VectorXd& z,
                                 EvalStats* stats = nullptr);

/// Sparse Jacobian of b(z); block diagonal with a symmetric 2n_q x 2n_q block
/// per element.
Eigen::SparseMatrix<double, Eigen::RowMajor> nonlinear_jacobian(
    const OperatorSet& ops, const Eigen::VectorXd& z);

/// Per-element Jacobian blocks (drr, dss, drs), cheaper than forming the
/// sparse matrix when the caller consumes them directly.
void for_each_nonlinear_block(
    const OperatorSet& ops, const Eigen::VectorXd& z,
    const std::function<void(int element, const Eigen::MatrixXd& drr,
                             const Eigen::MatrixXd& dss, const Eigen::MatrixXd& drs)>&
        visit);

/// Jacobian of b at z applied to the columns of a tall matrix, assembled
/// element by element.
Eigen::MatrixXd nonlinear_jacobian_times(const OperatorSet& ops,
                                         const Eigen::VectorXd& z,
                                         const Eigen::MatrixXd& w);

/// Selected entries of b(z): integrates only over the elements that own the
/// requested rows (one element per entry).
Eigen::VectorXd sampled_nonlinearity(const OperatorSet& ops,
                                     const std::vector<long>& rows,
                                     const Eigen::VectorXd& z,
                                     EvalStats* stats = nullptr);

/// Selected rows of the Jacobian of b at z, applied to the columns of w.
Eigen::MatrixXd sampled_jacobian_times(const OperatorSet& ops,
                                       const std::vector<long>& rows,
                                       const Eigen::VectorXd& z,
                                       const Eigen::MatrixXd& w);

/// Gradient of the discrete energy: [A r; A s] + b(z).
Eigen::VectorXd energy_gradient(const OperatorSet& ops, const Eigen::VectorXd& z,
                                EvalStats* stats = nullptr);

}  // namespace hrom

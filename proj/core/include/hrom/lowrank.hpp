#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "hrom/dg_space.hpp"

namespace hrom {

struct SvdResult {
  Eigen::MatrixXd left;             // m x k
  Eigen::VectorXd singular_values;  // k, non-increasing
  Eigen::MatrixXd right;            // n x k
};

/// Randomized SVD with Gaussian sketching: X = Y*Omega, QR, small SVD of Q^T Y.
/// Deterministic for a fixed seed. Requires 1 <= rank and
/// rank + oversampling <= min(m, n).
SvdResult rsvd(const Eigen::MatrixXd& matrix, int rank, int oversampling,
               std::uint64_t seed);

enum class SnapshotKind : std::uint8_t { state = 0, nonlinearity = 1 };

/// Column snapshots with uniform spacing dt between columns.
struct SnapshotSet {
  Eigen::MatrixXd columns;
  double dt = 0.0;
  SnapshotKind kind = SnapshotKind::state;
};

/// Mode-count choice: an explicit rank caps the basis size; otherwise the
/// smallest k whose energy fraction exceeds the threshold is used.
struct PodSelection {
  std::optional<int> rank;
  std::optional<double> threshold;
};

/// M-orthonormal POD basis. The energy fraction is the Eq.-(30)-style ratio at
/// the chosen k with the exact Frobenius denominator.
struct PodBasis {
  Eigen::MatrixXd modes;             // 2N x k, U^T M U = I
  Eigen::VectorXd singular_values;   // leading spectrum as computed (>= k values)
  double energy_fraction = 0.0;
  const MassMatrix* weight = nullptr;

  int k() const { return static_cast<int>(modes.cols()); }
};

/// POD of a snapshot set in the M-weighted inner product, via the Cholesky
/// route: modes are L^{-T} times the left singular vectors of L^T Z.
PodBasis pod_basis(const SnapshotSet& snapshots, const MassMatrix& mass,
                   const PodSelection& selection, int oversampling,
                   std::uint64_t seed);

/// Cumulative squared-singular-value ratio sum_{i<=k} s_i^2 / sum_i s_i^2 of a
/// full non-increasing spectrum.
double energy_criterion(const Eigen::VectorXd& singular_values, int k);

}  // namespace hrom

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "hrom/lowrank.hpp"
#include "hrom/sipg.hpp"

namespace hrom {

/// Greedy interpolation-index selection: the first index maximizes |Q_1|, each
/// next index maximizes the residual of the next column after interpolatory
/// projection onto the previous modes/indices. Ties break to the lowest index.
std::vector<long> deim_select(const Eigen::MatrixXd& modes);

/// Interpolatory approximation b ~ Q (P^T Q)^{-1} P^T b with precomputed
/// factorization of the sampled block. `combination` is B = U^T Q (P^T Q)^{-1}
/// once a reduced basis has been attached.
struct DeimInterpolant {
  Eigen::MatrixXd basis;                    // Q, 2N x m
  std::vector<long> indices;                // p_1..p_m
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // of P^T Q
  double conditioning = 0.0;                // ||(P^T Q)^{-1}||_2
  Eigen::MatrixXd combination;              // B, k x m (empty until attached)

  int m() const { return static_cast<int>(indices.size()); }
  Eigen::VectorXd coefficients(const Eigen::VectorXd& sampled) const;
  Eigen::VectorXd sample(const Eigen::VectorXd& full) const;  // P^T b
};

DeimInterpolant make_deim_interpolant(const Eigen::MatrixXd& modes);

/// Precomputes B = U^T Q (P^T Q)^{-1} for the reduced basis U.
void attach_reduced_basis(DeimInterpolant& interp, const Eigen::MatrixXd& basis);

/// Lifted approximant Q (P^T Q)^{-1} * sampled.
Eigen::VectorXd deim_apply(const DeimInterpolant& interp,
                           const Eigen::VectorXd& sampled);

/// The m sampled entries of b(U z_r), touching one element per entry.
Eigen::VectorXd deim_sampled_nonlinearity(const OperatorSet& ops,
                                          const DeimInterpolant& interp,
                                          const Eigen::VectorXd& z_reduced,
                                          const Eigen::MatrixXd& basis,
                                          EvalStats* stats = nullptr);

/// Exact DMD of a shifted snapshot pair: modes, continuous-time exponents
/// (principal branch of log(lambda)/dt) and amplitudes fitted to the first
/// snapshot by pseudo-inverse. Modes are ordered by decreasing |lambda|.
struct DmdModel {
  Eigen::MatrixXcd modes;        // 2N x m
  Eigen::VectorXcd eigenvalues;  // lambda_j
  Eigen::VectorXcd omega;        // log(lambda_j)/dt
  Eigen::VectorXcd amplitudes;
  double dt = 0.0;

  int rank() const { return static_cast<int>(modes.cols()); }
};

DmdModel dmd_fit(const Eigen::MatrixXd& snapshots,
                 const Eigen::MatrixXd& shifted_snapshots, double dt, int rank,
                 int oversampling, std::uint64_t seed);

/// Real part of U_dmd diag(e^{omega t}) alpha. Throws SaturationError when an
/// exponent overflows the double range.
Eigen::VectorXd dmd_predict(const DmdModel& model, double t);

/// Per-mode average of e^{omega t} over [t0, t0+tau], the exact time integral
/// divided by tau; falls back to the midpoint value for near-zero exponents.
Eigen::VectorXcd dmd_step_average(const DmdModel& model, double t0, double tau);

}  // namespace hrom

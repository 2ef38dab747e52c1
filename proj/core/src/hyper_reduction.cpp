#include "hrom/hyper_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hrom/errors.hpp"

namespace hrom {

std::vector<long> deim_select(const Eigen::MatrixXd& modes) {
  const long n = modes.rows();
  const long m = modes.cols();
  if (m < 1 || n < m) throw ConfigError("deim_select: bad mode matrix shape");

  auto argmax_abs = [&](const Eigen::VectorXd& v) {
    long arg = 0;
    double best = -1.0;
    for (long i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    return std::make_pair(arg, best);
  };

  std::vector<long> indices;
  indices.reserve(m);
  const auto [first, first_mag] = argmax_abs(modes.col(0));
  if (first_mag == 0.0) {
    throw RankDeficiencyError("deim_select: first mode is identically zero");
  }
  indices.push_back(first);

  for (long j = 1; j < m; ++j) {
    // Residual of column j after interpolation on the previous indices.
    Eigen::MatrixXd sampled(j, j);
    Eigen::VectorXd rhs(j);
    for (long a = 0; a < j; ++a) {
      rhs(a) = modes(indices[a], j);
      for (long b = 0; b < j; ++b) sampled(a, b) = modes(indices[a], b);
    }
    const Eigen::VectorXd coeff = sampled.partialPivLu().solve(rhs);
    const Eigen::VectorXd residual = modes.col(j) - modes.leftCols(j) * coeff;
    const auto [arg, mag] = argmax_abs(residual);
    if (!(mag > 0.0) || !residual.allFinite()) {
      throw RankDeficiencyError("deim_select: rank-deficient modes at column " +
                                std::to_string(j + 1));
    }
    indices.push_back(arg);
  }
  return indices;
}

Eigen::VectorXd DeimInterpolant::coefficients(const Eigen::VectorXd& sampled) const {
  return lu.solve(sampled);
}

Eigen::VectorXd DeimInterpolant::sample(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(static_cast<long>(indices.size()));
  for (size_t i = 0; i < indices.size(); ++i) out(static_cast<long>(i)) = full(indices[i]);
  return out;
}

DeimInterpolant make_deim_interpolant(const Eigen::MatrixXd& modes) {
  DeimInterpolant interp;
  interp.basis = modes;
  interp.indices = deim_select(modes);
  const long m = modes.cols();
  Eigen::MatrixXd sampled(m, m);
  for (long a = 0; a < m; ++a) sampled.row(a) = modes.row(interp.indices[a]);
  interp.lu = Eigen::PartialPivLU<Eigen::MatrixXd>(sampled);
  const Eigen::MatrixXd inv = interp.lu.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inv);
  interp.conditioning = svd.singularValues()(0);
  return interp;
}

void attach_reduced_basis(DeimInterpolant& interp, const Eigen::MatrixXd& basis) {
  // B = (U^T Q) (P^T Q)^{-1}; the sampled block is small (m x m).
  const Eigen::MatrixXd utq = basis.transpose() * interp.basis;  // k x m
  interp.combination = utq * interp.lu.inverse();
}

Eigen::VectorXd deim_apply(const DeimInterpolant& interp,
                           const Eigen::VectorXd& sampled) {
  return interp.basis * interp.coefficients(sampled);
}

Eigen::VectorXd deim_sampled_nonlinearity(const OperatorSet& ops,
                                          const DeimInterpolant& interp,
                                          const Eigen::VectorXd& z_reduced,
                                          const Eigen::MatrixXd& basis,
                                          EvalStats* stats) {
  const Eigen::VectorXd lifted = basis * z_reduced;
  return sampled_nonlinearity(ops, interp.indices, lifted, stats);
}

DmdModel dmd_fit(const Eigen::MatrixXd& snapshots,
                 const Eigen::MatrixXd& shifted_snapshots, double dt, int rank,
                 int oversampling, std::uint64_t seed) {
  if (snapshots.rows() != shifted_snapshots.rows() ||
      snapshots.cols() != shifted_snapshots.cols()) {
    throw ConfigError("dmd_fit: snapshot pair shapes differ");
  }
  if (!(dt > 0.0)) throw ConfigError("dmd_fit: dt must be positive");
  const long minmn = std::min(snapshots.rows(), snapshots.cols());
  if (rank < 1 || rank > minmn) {
    throw ConfigError("dmd_fit: rank must satisfy 1 <= m <= min(rows, cols)");
  }
  const int p =
      static_cast<int>(std::min<long>(oversampling, minmn - rank));

  const SvdResult svd = rsvd(snapshots, rank, std::max(p, 0), seed);
  const double sigma_floor = 1e-13 * svd.singular_values(0);
  if (!(svd.singular_values(rank - 1) > sigma_floor)) {
    throw RankDeficiencyError(
        "dmd_fit: leading block is rank deficient; choose a smaller mode count");
  }

  // K = G' V Sigma^{-1}; the small operator is U^* K.
  Eigen::MatrixXd k_matrix = shifted_snapshots * svd.right;
  for (int j = 0; j < rank; ++j) k_matrix.col(j) /= svd.singular_values(j);
  const Eigen::MatrixXd small_op = svd.left.transpose() * k_matrix;

  Eigen::EigenSolver<Eigen::MatrixXd> eig(small_op);
  if (eig.info() != Eigen::Success) throw Error("dmd_fit: eigensolver failed");

  // Order modes by decreasing |lambda|, then by ascending argument.
  std::vector<int> order(rank);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(lambda(a));
    const double mb = std::abs(lambda(b));
    if (ma != mb) return ma > mb;
    return std::arg(lambda(a)) < std::arg(lambda(b));
  });

  DmdModel model;
  model.dt = dt;
  model.eigenvalues.resize(rank);
  model.omega.resize(rank);
  model.modes.resize(snapshots.rows(), rank);
  const Eigen::MatrixXcd exact_modes = k_matrix * eig.eigenvectors();
  for (int j = 0; j < rank; ++j) {
    model.eigenvalues(j) = lambda(order[j]);
    model.omega(j) = std::log(lambda(order[j])) / dt;
    model.modes.col(j) = exact_modes.col(order[j]);
  }

  const Eigen::VectorXcd b0 = snapshots.col(0).cast<std::complex<double>>();
  model.amplitudes =
      model.modes.completeOrthogonalDecomposition().solve(b0);
  return model;
}

namespace {
Eigen::VectorXcd checked_exponentials(const Eigen::VectorXcd& omega, double t) {
  Eigen::VectorXcd out(omega.size());
  for (long j = 0; j < omega.size(); ++j) {
    const double growth = omega(j).real() * t;
    if (growth > 700.0) {
      throw SaturationError(
          "dmd_predict: unstable mode extrapolation overflows at t = " +
          std::to_string(t));
    }
    out(j) = std::exp(omega(j) * t);
  }
  return out;
}
}  // namespace

Eigen::VectorXd dmd_predict(const DmdModel& model, double t) {
  const Eigen::VectorXcd factors = checked_exponentials(model.omega, t);
  return (model.modes * factors.cwiseProduct(model.amplitudes)).real();
}

Eigen::VectorXcd dmd_step_average(const DmdModel& model, double t0, double tau) {
  Eigen::VectorXcd out(model.omega.size());
  const Eigen::VectorXcd at_t0 = checked_exponentials(model.omega, t0);
  const Eigen::VectorXcd at_t1 = checked_exponentials(model.omega, t0 + tau);
  for (long j = 0; j < model.omega.size(); ++j) {
    const std::complex<double> wt = model.omega(j) * tau;
    if (std::abs(wt) < 1e-14) {
      out(j) = std::exp(model.omega(j) * (t0 + 0.5 * tau));
    } else {
      out(j) = (at_t1(j) - at_t0(j)) / wt;
    }
  }
  return out;
}

}  // namespace hrom

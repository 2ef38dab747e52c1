#include "hrom/lowrank.hpp"

#include <cmath>
#include <random>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

/// Flip columns so each left vector's largest-magnitude entry is positive
/// (first occurrence wins ties); right vectors follow to keep U S V^T intact.
void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd* right) {
  for (long c = 0; c < left.cols(); ++c) {
    long arg = 0;
    double best = -1.0;
    for (long r = 0; r < left.rows(); ++r) {
      const double mag = std::abs(left(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (left(arg, c) < 0.0) {
      left.col(c) = -left.col(c);
      if (right) right->col(c) = -right->col(c);
    }
  }
}

}  // namespace

SvdResult rsvd(const Eigen::MatrixXd& matrix, int rank, int oversampling,
               std::uint64_t seed) {
  const long m = matrix.rows();
  const long n = matrix.cols();
  const long minmn = std::min(m, n);
  if (rank < 1 || rank > minmn) {
    throw ConfigError("rsvd: target rank must satisfy 1 <= k <= min(m,n)");
  }
  if (oversampling < 0 || rank + oversampling > minmn) {
    throw ConfigError("rsvd: k + p exceeds min(m,n)");
  }
  const long l = rank + oversampling;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd omega(n, l);
  for (long c = 0; c < l; ++c) {
    for (long r = 0; r < n; ++r) omega(r, c) = gauss(rng);
  }

  const Eigen::MatrixXd sketch = matrix * omega;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sketch);
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(m, l);
  const Eigen::MatrixXd small = q.transpose() * matrix;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(small,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResult result;
  result.left = (q * svd.matrixU()).leftCols(rank);
  result.singular_values = svd.singularValues().head(rank);
  result.right = svd.matrixV().leftCols(rank);
  fix_signs(result.left, &result.right);
  return result;
}

double energy_criterion(const Eigen::VectorXd& singular_values, int k) {
  const long d = singular_values.size();
  if (k < 1 || k > d) throw ConfigError("energy_criterion: k out of range");
  for (long i = 0; i + 1 < d; ++i) {
    if (singular_values(i) < singular_values(i + 1) - 1e-12 * singular_values(0)) {
      throw ConfigError("energy_criterion: singular values must be non-increasing");
    }
  }
  if (singular_values.minCoeff() < 0.0) {
    throw ConfigError("energy_criterion: singular values must be nonnegative");
  }
  const double total = singular_values.squaredNorm();
  if (!(total > 0.0)) {
    throw DegenerateInputError("energy_criterion: all singular values are zero");
  }
  return singular_values.head(k).squaredNorm() / total;
}

PodBasis pod_basis(const SnapshotSet& snapshots, const MassMatrix& mass,
                   const PodSelection& selection, int oversampling,
                   std::uint64_t seed) {
  const Eigen::MatrixXd& z = snapshots.columns;
  if (z.cols() < 1) throw DegenerateInputError("pod_basis: no snapshots");
  if (z.norm() == 0.0) {
    throw DegenerateInputError("pod_basis: snapshot matrix is identically zero");
  }
  if (!selection.rank && !selection.threshold) {
    throw ConfigError("pod_basis: neither rank nor threshold given");
  }

  const Eigen::MatrixXd weighted = mass.apply_cholesky_t(z);
  const double total_energy = weighted.squaredNorm();
  const long minmn = std::min(weighted.rows(), weighted.cols());

  auto spectrum_size = [&](int wanted) {
    return static_cast<int>(std::min<long>(minmn, wanted));
  };

  int probe = selection.rank ? spectrum_size(std::max(*selection.rank, 20))
                             : spectrum_size(32);
  SvdResult svd;
  int k = 0;
  for (;;) {
    const int p = static_cast<int>(
        std::min<long>(oversampling, minmn - probe));
    svd = rsvd(weighted, probe, std::max(p, 0), seed);
    if (selection.rank) {
      k = std::min(*selection.rank, probe);
      break;
    }
    // Threshold selection against the exact total energy.
    Eigen::VectorXd cum(svd.singular_values.size());
    double acc = 0.0;
    for (long i = 0; i < cum.size(); ++i) {
      acc += svd.singular_values(i) * svd.singular_values(i);
      cum(i) = acc / total_energy;
    }
    k = 0;
    for (long i = 0; i < cum.size(); ++i) {
      if (cum(i) > *selection.threshold) {
        k = static_cast<int>(i + 1);
        break;
      }
    }
    if (k > 0 || probe == minmn) break;
    probe = spectrum_size(2 * probe);
  }
  if (k == 0) {
    // Threshold never crossed within the full spectrum; use everything.
    k = static_cast<int>(svd.singular_values.size());
  }

  PodBasis basis;
  basis.modes = mass.solve_cholesky_t(Eigen::MatrixXd(svd.left.leftCols(k)));
  fix_signs(basis.modes, nullptr);
  basis.singular_values = svd.singular_values;
  basis.energy_fraction =
      svd.singular_values.head(k).squaredNorm() / total_energy;
  basis.weight = &mass;
  return basis;
}

}  // namespace hrom

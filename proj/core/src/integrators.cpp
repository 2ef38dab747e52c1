#include "hrom/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

TimeGrid TimeGrid::from(double tau, double horizon) {
  if (!(tau > 0.0)) throw ConfigError("TimeGrid: step size must be positive");
  if (!(horizon >= 0.0)) throw ConfigError("TimeGrid: horizon must be nonnegative");
  TimeGrid grid;
  grid.tau = tau;
  grid.horizon = horizon;
  grid.steps = static_cast<long>(std::llround(horizon / tau));
  if (std::abs(grid.steps * tau - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw ConfigError("TimeGrid: horizon is not an integer multiple of tau");
  }
  return grid;
}

NewtonResult newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    const Eigen::VectorXd& initial_guess, const NewtonSettings& settings) {
  NewtonResult result;
  result.solution = initial_guess;
  for (int it = 0; it <= settings.max_iterations; ++it) {
    const Eigen::VectorXd f = residual(result.solution);
    result.residual_norm = f.norm();
    if (result.residual_norm <= settings.tolerance) return result;
    if (it == settings.max_iterations) break;
    const Eigen::MatrixXd jac = jacobian(result.solution);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Eigen::VectorXd delta = lu.solve(-f);
    if (!delta.allFinite()) {
      throw Error("newton_solve: singular Jacobian");
    }
    result.solution += settings.damping * delta;
    result.iterations = it + 1;
  }
  throw NewtonFailure("newton_solve: no convergence within max iterations",
                      result.iterations, result.residual_norm);
}

namespace {

constexpr double kXi1 = 0.5 - 0.5 / 1.7320508075688772;
constexpr double kXi2 = 0.5 + 0.5 / 1.7320508075688772;

long find_slot(const Eigen::SparseMatrix<double>& m, long row, long col) {
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* begin = inner + outer[col];
  const auto* end = inner + outer[col + 1];
  const auto* hit = std::lower_bound(begin, end, static_cast<int>(row));
  if (hit == end || *hit != row) {
    throw Error("Newton matrix pattern is missing an expected entry");
  }
  return hit - inner;
}

}  // namespace

FomStepper::FomStepper(const OperatorSet& ops, NewtonSettings settings)
    : ops_(&ops), settings_(settings) {
  build_pattern();
}

void FomStepper::build_pattern() {
  const DgSpace& space = ops_->space();
  const long N = space.dimension();
  const int nq = space.local_dim();
  const auto& A = ops_->stiffness();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * space.mesh().element_count() * nq * nq + 2 * A.nonZeros());
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const long base = space.dof(e, 0);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) {
        trips.emplace_back(base + i, base + j, 1.0);
        trips.emplace_back(N + base + i, N + base + j, 1.0);
      }
  }
  stiff_values_.clear();
  std::vector<std::pair<long, long>> stiff_coords;
  for (long r = 0; r < A.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it;
         ++it) {
      trips.emplace_back(r, N + it.col(), 1.0);
      trips.emplace_back(N + r, it.col(), 1.0);
      stiff_values_.push_back(it.value());
      stiff_coords.emplace_back(r, it.col());
    }
  }
  matrix_.resize(2 * N, 2 * N);
  matrix_.setFromTriplets(trips.begin(), trips.end());
  matrix_.makeCompressed();

  mass_slots_tl_.clear();
  mass_slots_br_.clear();
  diag_slots_tr_.clear();
  diag_slots_bl_.clear();
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const long base = space.dof(e, 0);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) {
        mass_slots_tl_.push_back(find_slot(matrix_, base + i, base + j));
        mass_slots_br_.push_back(find_slot(matrix_, N + base + i, N + base + j));
        diag_slots_tr_.push_back(find_slot(matrix_, base + i, N + base + j));
        diag_slots_bl_.push_back(find_slot(matrix_, N + base + i, base + j));
      }
  }
  stiff_slots_tr_.clear();
  stiff_slots_bl_.clear();
  stiff_slots_tr_.reserve(stiff_coords.size());
  stiff_slots_bl_.reserve(stiff_coords.size());
  for (const auto& [r, c] : stiff_coords) {
    stiff_slots_tr_.push_back(find_slot(matrix_, r, N + c));
    stiff_slots_bl_.push_back(find_slot(matrix_, N + r, c));
  }
}

void FomStepper::fill_matrix(double stiffness_coeff, double jacobian_coeff,
                             const std::vector<Eigen::MatrixXd>& drr,
                             const std::vector<Eigen::MatrixXd>& dss,
                             const std::vector<Eigen::MatrixXd>& drs) {
  const DgSpace& space = ops_->space();
  const int nq = space.local_dim();
  double* vals = matrix_.valuePtr();
  std::fill(vals, vals + matrix_.nonZeros(), 0.0);

  // [[M - cJ Drs, -cA A - cJ Dss], [cA A + cJ Drr, M + cJ Drs]]
  long slot = 0;
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const Eigen::MatrixXd& mblk = ops_->mass().block(e);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j, ++slot) {
        const double m = mblk(i, j);
        const double d = drs[e](i, j);
        const double diag_tr = dss[e](i, j);
        const double diag_bl = drr[e](i, j);
        vals[mass_slots_tl_[slot]] += m - jacobian_coeff * d;
        vals[mass_slots_br_[slot]] += m + jacobian_coeff * d;
        vals[diag_slots_tr_[slot]] += -jacobian_coeff * diag_tr;
        vals[diag_slots_bl_[slot]] += jacobian_coeff * diag_bl;
      }
  }
  for (size_t k = 0; k < stiff_values_.size(); ++k) {
    vals[stiff_slots_tr_[k]] += -stiffness_coeff * stiff_values_[k];
    vals[stiff_slots_bl_[k]] += stiffness_coeff * stiff_values_[k];
  }
}

Eigen::VectorXd FomStepper::implicit_step(const Eigen::VectorXd& z, double tau,
                                          TimeIntegrator method) {
  const long N = ops_->dimension();
  if (z.size() != 2 * N) throw ConfigError("step: state must have length 2N");
  if (!(tau != 0.0)) throw ConfigError("step: tau must be nonzero");
  const bool avf = method == TimeIntegrator::avf;
  const double cA = avf ? 0.5 * tau : tau;
  const double cJ = tau;

  const int n_elems = ops_->space().mesh().element_count();
  std::vector<Eigen::MatrixXd> drr(n_elems), dss(n_elems), drs(n_elems);

  auto residual = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd u = avf ? Eigen::VectorXd(y + z) : y;
    Eigen::VectorXd bavg;
    if (avf) {
      bavg = 0.5 * (nonlinear_vector(*ops_, z + kXi1 * (y - z)) +
                    nonlinear_vector(*ops_, z + kXi2 * (y - z)));
    } else {
      bavg = nonlinear_vector(*ops_, y);
    }
    const Eigen::VectorXd au = ops_->apply_stiffness(u);
    Eigen::VectorXd f(2 * N);
    const Eigen::VectorXd d = y - z;
    f.head(N) = ops_->mass().apply(Eigen::VectorXd(d.head(N))) -
                cA * au.tail(N) - cJ * bavg.tail(N);
    f.tail(N) = ops_->mass().apply(Eigen::VectorXd(d.tail(N))) +
                cA * au.head(N) + cJ * bavg.head(N);
    return f;
  };

  auto collect_blocks = [&](const Eigen::VectorXd& y) {
    if (avf) {
      std::vector<Eigen::MatrixXd> tmp_rr(n_elems), tmp_ss(n_elems), tmp_rs(n_elems);
      for_each_nonlinear_block(*ops_, z + kXi1 * (y - z),
                               [&](int e, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
                                 tmp_rr[e] = a;
                                 tmp_ss[e] = b;
                                 tmp_rs[e] = c;
                               });
      for_each_nonlinear_block(*ops_, z + kXi2 * (y - z),
                               [&](int e, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
                                 drr[e] = 0.5 * (kXi1 * tmp_rr[e] + kXi2 * a);
                                 dss[e] = 0.5 * (kXi1 * tmp_ss[e] + kXi2 * b);
                                 drs[e] = 0.5 * (kXi1 * tmp_rs[e] + kXi2 * c);
                               });
    } else {
      for_each_nonlinear_block(*ops_, y,
                               [&](int e, const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
                                 drr[e] = a;
                                 dss[e] = b;
                                 drs[e] = c;
                               });
    }
  };

  Eigen::VectorXd y = z;
  last_iterations_ = 0;
  double res_norm = 0.0;
  for (int it = 0; it <= settings_.max_iterations; ++it) {
    const Eigen::VectorXd f = residual(y);
    res_norm = std::sqrt(f.dot(ops_->mass().solve(f)));
    if (res_norm <= settings_.tolerance) return y;
    if (it == settings_.max_iterations) break;
    collect_blocks(y);
    fill_matrix(cA, cJ, drr, dss, drs);
    if (!analyzed_) {
      solver_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    solver_.factorize(matrix_);
    if (solver_.info() != Eigen::Success) {
      throw Error("FomStepper: sparse factorization failed");
    }
    y += settings_.damping * solver_.solve(Eigen::VectorXd(-f));
    ++last_iterations_;
  }
  throw NewtonFailure("implicit step: Newton did not converge", last_iterations_,
                      res_norm);
}

Eigen::VectorXd FomStepper::avf_step(const Eigen::VectorXd& z, double tau) {
  return implicit_step(z, tau, TimeIntegrator::avf);
}

Eigen::VectorXd FomStepper::backward_euler_step(const Eigen::VectorXd& z,
                                                double tau) {
  return implicit_step(z, tau, TimeIntegrator::backward_euler);
}

Eigen::VectorXd avf_step(const OperatorSet& ops, const Eigen::VectorXd& z,
                         double tau, const NewtonSettings& settings) {
  FomStepper stepper(ops, settings);
  return stepper.avf_step(z, tau);
}

Eigen::VectorXd backward_euler_step(const OperatorSet& ops,
                                    const Eigen::VectorXd& z, double tau,
                                    const NewtonSettings& settings) {
  FomStepper stepper(ops, settings);
  return stepper.backward_euler_step(z, tau);
}

IntegrationResult integrate(const OperatorSet& ops, const Eigen::VectorXd& z0,
                            const TimeGrid& grid, TimeIntegrator method,
                            const NewtonSettings& settings,
                            const SnapshotSink& sink, long stride,
                            const ErrorProbe& error_probe, EvalStats* stats) {
  if (stride < 1) throw ConfigError("integrate: stride must be >= 1");
  IntegrationResult result;
  FomStepper stepper(ops, settings);
  Eigen::VectorXd z = z0;

  auto record = [&](long step, double t) {
    result.invariants.append(t, discrete_mass(ops.mass(), z),
                             discrete_energy(ops, z));
    if (error_probe) result.invariants.l2_error.push_back(error_probe(t, z));
    if (sink && step % stride == 0) sink(step, t, z, nonlinear_vector(ops, z, stats));
  };

  record(0, 0.0);
  using clock = std::chrono::steady_clock;
  for (long n = 0; n < grid.steps; ++n) {
    const auto t0 = clock::now();
    try {
      z = method == TimeIntegrator::avf ? stepper.avf_step(z, grid.tau)
                                        : stepper.backward_euler_step(z, grid.tau);
    } catch (const NewtonFailure& failure) {
      throw IntegrationError(
          "integration aborted at step " + std::to_string(n + 1) + ": " +
              failure.what(),
          n + 1);
    }
    result.step_seconds +=
        std::chrono::duration<double>(clock::now() - t0).count();
    result.newton_iterations += stepper.last_iterations();
    record(n + 1, (n + 1) * grid.tau);
  }
  result.steps = grid.steps;
  return result;
}

}  // namespace hrom

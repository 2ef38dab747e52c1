#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <vector>

#include "hrom/diagnostics.hpp"
#include "hrom/sipg.hpp"

namespace hrom {

/// Uniform step partition of [0, horizon]; steps * tau must equal the horizon
/// to one part in 1e12.
struct TimeGrid {
  double tau = 0.0;
  double horizon = 0.0;
  long steps = 0;

  static TimeGrid from(double tau, double horizon);
};

struct NewtonSettings {
  double tolerance = 1e-12;  // absolute, M-scaled residual norm
  int max_iterations = 50;
  double damping = 1.0;
};

struct NewtonResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Dense Newton iteration; throws NewtonFailure when the tolerance is not
/// reached within max_iterations and Error on a singular Jacobian.
NewtonResult newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    const Eigen::VectorXd& initial_guess, const NewtonSettings& settings);

enum class TimeIntegrator { avf, backward_euler };

/// Implicit stepper for M z_t = J(Az + b(z)). Keeps the Newton matrix sparsity
/// pattern and its symbolic factorization across steps; the xi-integral of the
/// average vector field is evaluated with the two-point Gauss rule, which is
/// exact for the cubic nonlinearity.
class FomStepper {
 public:
  FomStepper(const OperatorSet& ops, NewtonSettings settings);

  Eigen::VectorXd avf_step(const Eigen::VectorXd& z, double tau);
  Eigen::VectorXd backward_euler_step(const Eigen::VectorXd& z, double tau);

  int last_iterations() const { return last_iterations_; }

 private:
  Eigen::VectorXd implicit_step(const Eigen::VectorXd& z, double tau,
                                TimeIntegrator method);
  void build_pattern();
  void fill_matrix(double stiffness_coeff, double jacobian_coeff,
                   const std::vector<Eigen::MatrixXd>& drr,
                   const std::vector<Eigen::MatrixXd>& dss,
                   const std::vector<Eigen::MatrixXd>& drs);

  const OperatorSet* ops_;
  NewtonSettings settings_;
  int last_iterations_ = 0;

  Eigen::SparseMatrix<double> matrix_;  // column major for SparseLU
  std::vector<long> mass_slots_tl_, mass_slots_br_;
  std::vector<long> stiff_slots_tr_, stiff_slots_bl_;
  std::vector<double> stiff_values_;
  std::vector<long> diag_slots_tr_, diag_slots_bl_;  // element-diagonal block slots
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
};

/// One energy-preserving average-vector-field step (convenience wrapper that
/// builds a fresh stepper).
Eigen::VectorXd avf_step(const OperatorSet& ops, const Eigen::VectorXd& z,
                         double tau, const NewtonSettings& settings);

Eigen::VectorXd backward_euler_step(const OperatorSet& ops,
                                    const Eigen::VectorXd& z, double tau,
                                    const NewtonSettings& settings);

/// Receives z_n and b(z_n) for every emitted step (stride-spaced, step 0 included).
using SnapshotSink =
    std::function<void(long step, double t, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& b)>;

/// Optional per-step probe, e.g. the L2 error against an exact solution.
using ErrorProbe = std::function<double(double t, const Eigen::VectorXd& z)>;

struct IntegrationResult {
  InvariantSeries invariants;
  double step_seconds = 0.0;  // wall clock around the implicit solves only
  long steps = 0;
  long newton_iterations = 0;
};

IntegrationResult integrate(const OperatorSet& ops, const Eigen::VectorXd& z0,
                            const TimeGrid& grid, TimeIntegrator method,
                            const NewtonSettings& settings,
                            const SnapshotSink& sink = nullptr, long stride = 1,
                            const ErrorProbe& error_probe = nullptr,
                            EvalStats* stats = nullptr);

}  // namespace hrom

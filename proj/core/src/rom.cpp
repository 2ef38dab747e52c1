#include "hrom/rom.hpp"

#include <chrono>
#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

/// J w for the stacked layout: [w_s; -w_r].
Eigen::VectorXd apply_j(const Eigen::VectorXd& w) {
  const long n = w.size() / 2;
  Eigen::VectorXd out(w.size());
  out.head(n) = w.tail(n);
  out.tail(n) = -w.head(n);
  return out;
}

Eigen::MatrixXd apply_j(const Eigen::MatrixXd& w) {
  const long n = w.rows() / 2;
  Eigen::MatrixXd out(w.rows(), w.cols());
  out.topRows(n) = w.bottomRows(n);
  out.bottomRows(n) = -w.topRows(n);
  return out;
}

constexpr double kXi1 = 0.5 - 0.5 / 1.7320508075688772;
constexpr double kXi2 = 0.5 + 0.5 / 1.7320508075688772;

}  // namespace

Eigen::VectorXd RomSystem::lift(const Eigen::VectorXd& z_reduced) const {
  return basis * z_reduced;
}

Eigen::VectorXd RomSystem::restrict_state(const Eigen::VectorXd& z_full) const {
  return basis.transpose() * ops->mass().apply(z_full);
}

RomSystem build_rom(const PodBasis& basis, const OperatorSet& ops, Reducer reducer,
                    bool corrected) {
  if (basis.modes.rows() != ops.state_dimension()) {
    throw ConfigError("build_rom: basis and operators have mismatched dimensions");
  }
  RomSystem sys;
  sys.basis = basis.modes;
  sys.corrected = corrected;
  sys.ops = &ops;

  const Eigen::MatrixXd au = [&] {
    Eigen::MatrixXd out(sys.basis.rows(), sys.basis.cols());
    for (long c = 0; c < sys.basis.cols(); ++c) {
      out.col(c) = ops.apply_stiffness(Eigen::VectorXd(sys.basis.col(c)));
    }
    return out;
  }();
  sys.reduced_stiffness = sys.basis.transpose() * au;
  sys.jr = sys.basis.transpose() * apply_j(ops.mass().apply(sys.basis));
  sys.ar = corrected ? Eigen::MatrixXd(sys.jr * sys.reduced_stiffness)
                     : Eigen::MatrixXd(sys.basis.transpose() * apply_j(au));

  if (std::holds_alternative<DeimInterpolant>(reducer)) {
    sys.variant = RomVariant::deim;
    sys.deim = std::get<DeimInterpolant>(std::move(reducer));
    if (corrected) {
      attach_reduced_basis(*sys.deim, sys.basis);
    } else {
      // Fold the J projection into B: U^T J Q (P^T Q)^{-1} = (-JU)^T Q (...).
      attach_reduced_basis(*sys.deim, Eigen::MatrixXd(-apply_j(sys.basis)));
    }
  } else if (std::holds_alternative<DmdModel>(reducer)) {
    sys.variant = RomVariant::dmd;
    sys.dmd = std::get<DmdModel>(std::move(reducer));
    const Eigen::MatrixXcd proj =
        sys.basis.cast<std::complex<double>>().transpose() * sys.dmd->modes;
    if (corrected) {
      sys.dmd_forcing = sys.jr.cast<std::complex<double>>() * proj;
    } else {
      sys.dmd_forcing = sys.basis.cast<std::complex<double>>().transpose() *
                        apply_j(Eigen::MatrixXd(sys.dmd->modes.real())) +
                        std::complex<double>(0, 1) *
                            (sys.basis.cast<std::complex<double>>().transpose() *
                             apply_j(Eigen::MatrixXd(sys.dmd->modes.imag())));
    }
  } else {
    sys.variant = RomVariant::pod;
  }
  return sys;
}

namespace {

/// Reduced nonlinear term N(w_r): U^T b(U w_r) for POD, B P^T b(U w_r) for DEIM.
Eigen::VectorXd reduced_nonlinearity(const RomSystem& sys,
                                     const Eigen::VectorXd& w_reduced,
                                     EvalStats* stats) {
  const Eigen::VectorXd lifted = sys.lift(w_reduced);
  if (sys.variant == RomVariant::deim) {
    const Eigen::VectorXd sampled =
        sampled_nonlinearity(*sys.ops, sys.deim->indices, lifted, stats);
    return sys.deim->combination * sampled;
  }
  const Eigen::VectorXd full = nonlinear_vector(*sys.ops, lifted, stats);
  if (sys.corrected) return sys.basis.transpose() * full;
  return sys.basis.transpose() * apply_j(full);
}

/// d/dw of the reduced nonlinear term, k x k.
Eigen::MatrixXd reduced_nonlinearity_jacobian(const RomSystem& sys,
                                              const Eigen::VectorXd& w_reduced) {
  const Eigen::VectorXd lifted = sys.lift(w_reduced);
  if (sys.variant == RomVariant::deim) {
    const Eigen::MatrixXd rows =
        sampled_jacobian_times(*sys.ops, sys.deim->indices, lifted, sys.basis);
    return sys.deim->combination * rows;
  }
  const Eigen::MatrixXd jtimes = nonlinear_jacobian_times(*sys.ops, lifted, sys.basis);
  if (sys.corrected) return sys.basis.transpose() * jtimes;
  return sys.basis.transpose() * apply_j(jtimes);
}

Eigen::VectorXd project_gradient(const RomSystem& sys, const Eigen::VectorXd& g) {
  return sys.corrected ? Eigen::VectorXd(sys.jr * g) : g;
}

}  // namespace

Eigen::VectorXd rom_rhs_pod(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                            EvalStats* stats) {
  const Eigen::VectorXd linear = sys.reduced_stiffness * z_reduced;
  if (sys.corrected) {
    return sys.jr * (linear + reduced_nonlinearity(sys, z_reduced, stats));
  }
  return sys.ar * z_reduced + reduced_nonlinearity(sys, z_reduced, stats);
}

Eigen::VectorXd rom_rhs_deim(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                             EvalStats* stats) {
  if (sys.variant != RomVariant::deim || !sys.deim) {
    throw ConfigError("rom_rhs_deim: no DEIM reducer attached");
  }
  if (sys.corrected) {
    return sys.jr * (sys.reduced_stiffness * z_reduced +
                     reduced_nonlinearity(sys, z_reduced, stats));
  }
  return sys.ar * z_reduced + reduced_nonlinearity(sys, z_reduced, stats);
}

Eigen::VectorXd rom_rhs_dmd(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                            double t) {
  if (sys.variant != RomVariant::dmd || !sys.dmd) {
    throw ConfigError("rom_rhs_dmd: no DMD reducer attached");
  }
  Eigen::VectorXcd factors(sys.dmd->omega.size());
  for (long j = 0; j < factors.size(); ++j) {
    if (sys.dmd->omega(j).real() * t > 700.0) {
      throw SaturationError("rom_rhs_dmd: forcing overflow");
    }
    factors(j) = std::exp(sys.dmd->omega(j) * t) * sys.dmd->amplitudes(j);
  }
  return sys.ar * z_reduced + (sys.dmd_forcing * factors).real();
}

Eigen::VectorXd rom_rhs(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                        double t, EvalStats* stats) {
  switch (sys.variant) {
    case RomVariant::pod:
      return rom_rhs_pod(sys, z_reduced, stats);
    case RomVariant::deim:
      return rom_rhs_deim(sys, z_reduced, stats);
    case RomVariant::dmd:
      return rom_rhs_dmd(sys, z_reduced, t);
  }
  throw ConfigError("rom_rhs: unknown variant");
}

RomStepper::RomStepper(const RomSystem& sys, NewtonSettings settings)
    : sys_(&sys), settings_(settings) {}

Eigen::VectorXd RomStepper::step(const Eigen::VectorXd& z, double t, double tau,
                                 EvalStats* stats) {
  const int k = sys_->k();
  if (z.size() != k) throw ConfigError("RomStepper: state has wrong length");

  if (sys_->variant == RomVariant::dmd) {
    // Linear step: (I - tau/2 A^r) y = (I + tau/2 A^r) z + tau * averaged forcing.
    if (tau != cached_tau_) {
      dmd_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(
          Eigen::MatrixXd::Identity(k, k) - 0.5 * tau * sys_->ar);
      cached_tau_ = tau;
    }
    const Eigen::VectorXcd avg = dmd_step_average(*sys_->dmd, t, tau);
    const Eigen::VectorXd forcing =
        (sys_->dmd_forcing * avg.cwiseProduct(sys_->dmd->amplitudes)).real();
    const Eigen::VectorXd rhs =
        z + 0.5 * tau * (sys_->ar * z) + tau * forcing;
    last_iterations_ = 0;
    return dmd_lu_.solve(rhs);
  }

  auto residual = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd w1 = z + kXi1 * (y - z);
    const Eigen::VectorXd w2 = z + kXi2 * (y - z);
    const Eigen::VectorXd navg = 0.5 * (reduced_nonlinearity(*sys_, w1, stats) +
                                        reduced_nonlinearity(*sys_, w2, stats));
    const Eigen::VectorXd gavg =
        0.5 * (sys_->reduced_stiffness * (y + z)) + navg;
    return Eigen::VectorXd(y - z - tau * project_gradient(*sys_, gavg));
  };

  Eigen::VectorXd y = z;
  last_iterations_ = 0;
  double res_norm = 0.0;
  for (int it = 0; it <= settings_.max_iterations; ++it) {
    const Eigen::VectorXd f = residual(y);
    res_norm = f.norm();
    if (res_norm <= settings_.tolerance) return y;
    if (it == settings_.max_iterations) break;
    const Eigen::MatrixXd davg =
        0.5 * (kXi1 * reduced_nonlinearity_jacobian(*sys_, z + kXi1 * (y - z)) +
               kXi2 * reduced_nonlinearity_jacobian(*sys_, z + kXi2 * (y - z)));
    Eigen::MatrixXd inner = 0.5 * sys_->reduced_stiffness + davg;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(sys_->k(), sys_->k());
    if (sys_->corrected) {
      jac -= tau * sys_->jr * inner;
    } else {
      jac -= tau * inner;  // uncorrected variant already carries J inside N
    }
    y += settings_.damping *
         Eigen::PartialPivLU<Eigen::MatrixXd>(jac).solve(Eigen::VectorXd(-f));
    ++last_iterations_;
  }
  throw NewtonFailure("RomStepper: Newton did not converge", last_iterations_,
                      res_norm);
}

RomIntegrationResult integrate_rom(const RomSystem& sys,
                                   const Eigen::VectorXd& z_reduced0,
                                   const TimeGrid& grid,
                                   const NewtonSettings& settings,
                                   const ErrorProbe& error_probe) {
  RomIntegrationResult result;
  RomStepper stepper(sys, settings);
  const int k = sys.k();
  result.trajectory.resize(k, grid.steps + 1);

  Eigen::VectorXd z = z_reduced0;
  auto record = [&](long step, double t) {
    result.trajectory.col(step) = z;
    const Eigen::VectorXd lifted = sys.lift(z);
    result.invariants.append(t, discrete_mass(sys.ops->mass(), lifted),
                             discrete_energy(*sys.ops, lifted));
    if (error_probe) result.invariants.l2_error.push_back(error_probe(t, lifted));
  };

  record(0, 0.0);
  using clock = std::chrono::steady_clock;
  for (long n = 0; n < grid.steps; ++n) {
    const auto t0 = clock::now();
    try {
      z = stepper.step(z, n * grid.tau, grid.tau, &result.stats);
    } catch (const NewtonFailure& failure) {
      throw IntegrationError("reduced integration aborted at step " +
                                 std::to_string(n + 1) + ": " + failure.what(),
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

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "hrom/hyper_reduction.hpp"
#include "hrom/integrators.hpp"
#include "hrom/lowrank.hpp"

namespace hrom {

enum class RomVariant : std::uint8_t { pod = 0, deim = 1, dmd = 2 };

/// Energy-preserving reduced system. With `corrected` set (the default) the
/// dynamics are dz_r/dt = J_r [U^T A U z_r + <reduced nonlinearity>], which is
/// Hamiltonian since J_r = U^T J M U is skew; without it the plain Galerkin
/// projection U^T J (...) is used.
struct RomSystem {
  Eigen::MatrixXd basis;              // U, 2N x k
  Eigen::MatrixXd reduced_stiffness;  // S = U^T A U (k x k, symmetric)
  Eigen::MatrixXd jr;                 // J_r (k x k, skew)
  Eigen::MatrixXd ar;                 // A^r = J_r S (corrected) or U^T J A U
  RomVariant variant = RomVariant::pod;
  bool corrected = true;
  std::optional<DeimInterpolant> deim;
  std::optional<DmdModel> dmd;
  Eigen::MatrixXcd dmd_forcing;  // J_r U^T U_dmd (k x m), offline product

  const OperatorSet* ops = nullptr;

  int k() const { return static_cast<int>(basis.cols()); }
  Eigen::VectorXd lift(const Eigen::VectorXd& z_reduced) const;
  Eigen::VectorXd restrict_state(const Eigen::VectorXd& z_full) const;
};

using Reducer = std::variant<std::monostate, DeimInterpolant, DmdModel>;

/// Assembles all offline products of the reduced system for the given basis;
/// the reducer selects the variant (none = plain POD).
RomSystem build_rom(const PodBasis& basis, const OperatorSet& ops,
                    Reducer reducer = std::monostate{}, bool corrected = true);

/// Right sides of the three reduced systems.
Eigen::VectorXd rom_rhs_pod(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                            EvalStats* stats = nullptr);
Eigen::VectorXd rom_rhs_deim(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                             EvalStats* stats = nullptr);
Eigen::VectorXd rom_rhs_dmd(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                            double t);
Eigen::VectorXd rom_rhs(const RomSystem& sys, const Eigen::VectorXd& z_reduced,
                        double t, EvalStats* stats = nullptr);

/// Advances the reduced system with the average vector field scheme. POD/DEIM
/// variants solve the k-dimensional nonlinear system by Newton; the DMD
/// variant is a single linear solve with the forcing averaged in closed form
/// over the step.
class RomStepper {
 public:
  RomStepper(const RomSystem& sys, NewtonSettings settings);

  Eigen::VectorXd step(const Eigen::VectorXd& z_reduced, double t, double tau,
                       EvalStats* stats = nullptr);
  int last_iterations() const { return last_iterations_; }

 private:
  const RomSystem* sys_;
  NewtonSettings settings_;
  int last_iterations_ = 0;
  double cached_tau_ = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> dmd_lu_;  // of I - tau/2 A^r
};

struct RomIntegrationResult {
  Eigen::MatrixXd trajectory;  // k x (steps + 1), reduced states
  InvariantSeries invariants;  // of the lifted states
  double step_seconds = 0.0;
  long steps = 0;
  long newton_iterations = 0;
  EvalStats stats;
};

RomIntegrationResult integrate_rom(const RomSystem& sys,
                                   const Eigen::VectorXd& z_reduced0,
                                   const TimeGrid& grid,
                                   const NewtonSettings& settings,
                                   const ErrorProbe& error_probe = nullptr);

}  // namespace hrom

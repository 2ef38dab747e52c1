#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hrom/config.hpp"
#include "hrom/diagnostics.hpp"
#include "hrom/integrators.hpp"
#include "hrom/rom.hpp"
#include "hrom/snapshot_io.hpp"

namespace hrom {

/// Assembled problem matching a config. Members are heap-held so the struct
/// can move without invalidating the internal cross references.
struct Problem {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<DgSpace> space;
  std::unique_ptr<OperatorSet> ops;
  Eigen::VectorXd initial_state;
  std::optional<PlaneWave> exact_wave;  // set when an exact reference exists
  double omega_effective = 0.0;
  double omega_paper_convention = 0.0;

  NewtonSettings newton(const RunConfig& cfg) const {
    return NewtonSettings{cfg.newton_tolerance, cfg.newton_max_iterations, 1.0};
  }
};

Problem make_problem(const RunConfig& cfg);

/// Sub-seed derivation so that every randomized stage draws from the single
/// config seed. splitmix64 of seed + salt.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

struct FomRunResult {
  InvariantSeries invariants;
  double solve_seconds = 0.0;
  long steps = 0;
  long newton_iterations = 0;
  std::string states_path;
  std::string nonlinearity_path;
  std::string invariants_path;
  std::string meta_path;
};

/// Full-order run: writes state and nonlinearity snapshots at the configured
/// stride, the invariant CSV, and a metadata record. The rom section of the
/// config is not consulted.
FomRunResult run_fom(const RunConfig& cfg);

struct RomBuildResult {
  RomArtifact artifact;
  std::string artifact_path;
  std::string meta_path;
  double offline_seconds = 0.0;
};

/// Offline stage: POD basis from the stored state snapshots, reducer from the
/// nonlinearity snapshots, all reduced operators precomputed and serialized.
RomBuildResult build_rom_offline(const RunConfig& cfg);

struct RomRunResult {
  InvariantSeries invariants;
  Eigen::MatrixXd reduced_trajectory;
  double online_seconds = 0.0;
  long steps = 0;
  long newton_iterations = 0;
  EvalStats stats;
  std::string invariants_path;
  std::string trajectory_path;
  std::string meta_path;
};

RomRunResult run_rom_online(const RunConfig& cfg);

struct SweepRow {
  std::string reducer;
  int m = 0;
  double l2l2_error = 0.0;
  double energy_drift = 0.0;
  double mass_drift = 0.0;
};

/// Error/drift sweep over hyper-reduction mode counts at fixed POD rank, for
/// both reducers; requires stored FOM snapshots.
std::vector<SweepRow> sweep_modes(const RunConfig& cfg,
                                  const std::vector<int>& mode_counts,
                                  std::string* csv_path = nullptr);

struct BenchRow {
  std::string label;
  double seconds = 0.0;
  double speedup = 1.0;
};

/// FOM vs ROM online timing; ROM runs are repeated and the median reported.
std::vector<BenchRow> bench(const RunConfig& cfg, int repeat = 1,
                            std::string* csv_path = nullptr);

/// Reconstructs an integrable reduced system from a stored artifact.
RomSystem rom_system_from_artifact(const RomArtifact& artifact,
                                   const OperatorSet& ops);

/// In-memory offline build used by the orchestration paths and tests.
RomArtifact build_artifact(const RunConfig& cfg, const OperatorSet& ops,
                           const SnapshotSet& states, const SnapshotSet& nonlin);

}  // namespace hrom

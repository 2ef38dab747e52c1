#include "hrom/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hrom/errors.hpp"

namespace hrom {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + salt * 0x9E3779B97F4A7C15ULL;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

namespace {
constexpr std::uint64_t kPodSalt = 1;
constexpr std::uint64_t kDeimSalt = 2;
constexpr std::uint64_t kDmdSalt = 3;

ScalarField make_potential(const RunConfig& cfg) {
  if (cfg.potential == PotentialKind::none) return nullptr;
  const double gx = cfg.gamma_x;
  const double gy = cfg.gamma_y;
  return [gx, gy](double x, double y) { return 0.5 * (gx * x * x + gy * y * y); };
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

ErrorProbe make_error_probe(const Problem& problem) {
  if (!problem.exact_wave) return nullptr;
  const PlaneWave wave = *problem.exact_wave;
  const DgSpace* space = problem.space.get();
  return [wave, space](double t, const Eigen::VectorXd& z) {
    return solution_l2_error(
        *space, z,
        [&](double x, double y) { return plane_wave_value(wave, t, x, y).real(); },
        [&](double x, double y) { return plane_wave_value(wave, t, x, y).imag(); });
  };
}

std::vector<std::string> invariant_header(bool with_error, bool reduced) {
  std::vector<std::string> h = {"t", "mass", "energy", "mass_drift", "energy_drift"};
  if (with_error) h.push_back("l2_error");
  if (reduced) h.push_back("k");
  return h;
}

void write_invariants_csv(const std::string& path, const InvariantSeries& inv,
                          int reduced_dim = -1) {
  const bool with_error = !inv.l2_error.empty();
  CsvWriter csv(path, invariant_header(with_error, reduced_dim >= 0));
  for (size_t i = 0; i < inv.time.size(); ++i) {
    std::vector<double> row = {inv.time[i], inv.mass[i], inv.energy[i],
                               std::abs(inv.mass[i] - inv.mass[0]),
                               std::abs(inv.energy[i] - inv.energy[0])};
    if (with_error) row.push_back(inv.l2_error[i]);
    if (reduced_dim >= 0) row.push_back(static_cast<double>(reduced_dim));
    csv.row(row);
  }
}

}  // namespace

Problem make_problem(const RunConfig& cfg) {
  cfg.validate();
  Problem p;
  p.mesh = std::make_unique<Mesh>(
      build_periodic_mesh(cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax, cfg.nx, cfg.ny));
  p.space = std::make_unique<DgSpace>(*p.mesh, cfg.degree);
  Physics phys;
  phys.alpha = cfg.alpha;
  phys.beta = cfg.beta;
  phys.kappa = cfg.kappa;
  phys.potential = make_potential(cfg);
  p.ops = std::make_unique<OperatorSet>(*p.space, phys);

  p.omega_paper_convention =
      cfg.c1 * cfg.c1 + cfg.c2 * cfg.c2 - cfg.beta * cfg.amplitude * cfg.amplitude;
  if (cfg.initial == InitialKind::plane_wave) {
    PlaneWave wave;
    wave.amplitude = cfg.amplitude;
    wave.c1 = cfg.c1;
    wave.c2 = cfg.c2;
    wave.omega = cfg.omega_override
                     ? *cfg.omega_override
                     : plane_wave_frequency(cfg.alpha, cfg.beta, cfg.amplitude,
                                            cfg.c1, cfg.c2);
    p.omega_effective = wave.omega;
    p.initial_state = plane_wave_state(*p.space, p.ops->mass(), wave, 0.0);
    if (cfg.potential == PotentialKind::none) p.exact_wave = wave;
  } else {
    p.initial_state = gaussian_state(*p.space, p.ops->mass());
    p.omega_effective = 0.0;
  }
  return p;
}

FomRunResult run_fom(const RunConfig& cfg) {
  Problem problem = make_problem(cfg);
  const TimeGrid grid = TimeGrid::from(cfg.tau, cfg.horizon);
  fs::create_directories(cfg.output_directory);

  const long n_emitted = grid.steps / cfg.snapshot_stride + 1;
  Eigen::MatrixXd states(problem.ops->state_dimension(), n_emitted);
  Eigen::MatrixXd nonlin(problem.ops->state_dimension(), n_emitted);
  long emitted = 0;
  auto sink = [&](long, double, const Eigen::VectorXd& z, const Eigen::VectorXd& b) {
    states.col(emitted) = z;
    nonlin.col(emitted) = b;
    ++emitted;
  };

  const IntegrationResult result = integrate(
      *problem.ops, problem.initial_state, grid,
      cfg.backward_euler ? TimeIntegrator::backward_euler : TimeIntegrator::avf,
      problem.newton(cfg), sink, cfg.snapshot_stride, make_error_probe(problem));

  FomRunResult out;
  out.invariants = result.invariants;
  out.solve_seconds = result.step_seconds;
  out.steps = result.steps;
  out.newton_iterations = result.newton_iterations;

  const double snapshot_dt = cfg.tau * cfg.snapshot_stride;
  out.states_path = (fs::path(cfg.output_directory) / "states.snap").string();
  out.nonlinearity_path =
      (fs::path(cfg.output_directory) / "nonlinearity.snap").string();
  write_snapshot_file(out.states_path, states.leftCols(emitted), snapshot_dt,
                      SnapshotKind::state);
  write_snapshot_file(out.nonlinearity_path, nonlin.leftCols(emitted), snapshot_dt,
                      SnapshotKind::nonlinearity);

  out.invariants_path =
      (fs::path(cfg.output_directory) / "fom_invariants.csv").string();
  write_invariants_csv(out.invariants_path, out.invariants);

  out.meta_path = (fs::path(cfg.output_directory) / "fom_meta.json").string();
  write_json(out.meta_path,
             json{{"integrator", cfg.backward_euler ? "backward_euler" : "avf"},
                  {"steps", out.steps},
                  {"tau", cfg.tau},
                  {"solve_seconds", out.solve_seconds},
                  {"newton_iterations", out.newton_iterations},
                  {"snapshots", emitted},
                  {"snapshot_stride", cfg.snapshot_stride},
                  {"seed", cfg.seed},
                  {"omega_effective", problem.omega_effective},
                  {"omega_paper_convention", problem.omega_paper_convention},
                  {"mass_drift", out.invariants.mass_drift()},
                  {"energy_drift", out.invariants.energy_drift()}});
  return out;
}

RomArtifact build_artifact(const RunConfig& cfg, const OperatorSet& ops,
                           const SnapshotSet& states, const SnapshotSet& nonlin) {
  if (cfg.rom == RomKind::none) {
    throw ConfigError("build_artifact: config requests no reduced model");
  }
  if (states.columns.rows() != ops.state_dimension()) {
    throw ConfigError("build_artifact: snapshot dimension does not match config");
  }

  PodSelection selection{cfg.pod_rank, cfg.energy_threshold};
  const PodBasis basis = pod_basis(states, ops.mass(), selection, cfg.oversampling,
                                   derive_seed(cfg.seed, kPodSalt));

  RomArtifact artifact;
  artifact.variant = cfg.rom;
  artifact.corrected = !cfg.uncorrected_jr;
  artifact.k = static_cast<std::uint32_t>(basis.k());
  artifact.seed = cfg.seed;
  artifact.energy_fraction = basis.energy_fraction;
  artifact.dt = states.dt;
  artifact.state_singular_values = basis.singular_values;

  Reducer reducer;
  if (cfg.rom == RomKind::pod_deim) {
    const int m = cfg.hyper_modes;
    const long maxm = std::min(nonlin.columns.rows(), nonlin.columns.cols());
    if (m > maxm) throw ConfigError("build_artifact: m exceeds snapshot rank bound");
    const int p = static_cast<int>(std::min<long>(cfg.oversampling, maxm - m));
    const SvdResult svd = rsvd(nonlin.columns, m, std::max(p, 0),
                               derive_seed(cfg.seed, kDeimSalt));
    artifact.nonlinearity_singular_values = svd.singular_values;
    reducer = make_deim_interpolant(svd.left);
    artifact.m = static_cast<std::uint32_t>(m);
  } else if (cfg.rom == RomKind::pod_dmd) {
    const long cols = nonlin.columns.cols();
    if (cols < 2) throw ConfigError("build_artifact: DMD needs at least two snapshots");
    const Eigen::MatrixXd g = nonlin.columns.leftCols(cols - 1);
    const Eigen::MatrixXd gp = nonlin.columns.rightCols(cols - 1);
    DmdModel model = dmd_fit(g, gp, nonlin.dt, cfg.hyper_modes, cfg.oversampling,
                             derive_seed(cfg.seed, kDmdSalt));
    artifact.m = static_cast<std::uint32_t>(model.rank());
    reducer = std::move(model);
  }

  const RomSystem sys = build_rom(basis, ops, std::move(reducer), !cfg.uncorrected_jr);
  artifact.basis = sys.basis;
  artifact.jr = sys.jr;
  artifact.reduced_stiffness = sys.reduced_stiffness;
  artifact.ar = sys.ar;
  if (sys.deim) {
    artifact.deim_basis = sys.deim->basis;
    artifact.deim_indices = sys.deim->indices;
    artifact.deim_combination = sys.deim->combination;
  }
  if (sys.dmd) {
    artifact.dmd_modes = sys.dmd->modes;
    artifact.dmd_eigenvalues = sys.dmd->eigenvalues;
    artifact.dmd_omega = sys.dmd->omega;
    artifact.dmd_amplitudes = sys.dmd->amplitudes;
  }
  return artifact;
}

RomSystem rom_system_from_artifact(const RomArtifact& artifact,
                                   const OperatorSet& ops) {
  if (artifact.basis.rows() != ops.state_dimension()) {
    throw ConfigError("rom artifact dimension does not match the configuration");
  }
  RomSystem sys;
  sys.basis = artifact.basis;
  sys.reduced_stiffness = artifact.reduced_stiffness;
  sys.jr = artifact.jr;
  sys.ar = artifact.ar;
  sys.corrected = artifact.corrected;
  sys.ops = &ops;
  switch (artifact.variant) {
    case RomKind::pod:
      sys.variant = RomVariant::pod;
      break;
    case RomKind::pod_deim: {
      sys.variant = RomVariant::deim;
      DeimInterpolant interp;
      interp.basis = artifact.deim_basis;
      interp.indices = artifact.deim_indices;
      const long m = artifact.deim_basis.cols();
      Eigen::MatrixXd sampled(m, m);
      for (long a = 0; a < m; ++a) sampled.row(a) = interp.basis.row(interp.indices[a]);
      interp.lu = Eigen::PartialPivLU<Eigen::MatrixXd>(sampled);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(interp.lu.inverse());
      interp.conditioning = svd.singularValues()(0);
      interp.combination = artifact.deim_combination;
      sys.deim = std::move(interp);
      break;
    }
    case RomKind::pod_dmd: {
      sys.variant = RomVariant::dmd;
      DmdModel model;
      model.modes = artifact.dmd_modes;
      model.eigenvalues = artifact.dmd_eigenvalues;
      model.omega = artifact.dmd_omega;
      model.amplitudes = artifact.dmd_amplitudes;
      model.dt = artifact.dt;
      sys.dmd = std::move(model);
      const Eigen::MatrixXcd proj =
          sys.basis.cast<std::complex<double>>().transpose() * sys.dmd->modes;
      sys.dmd_forcing = sys.jr.cast<std::complex<double>>() * proj;
      break;
    }
    default:
      throw ConfigError("rom artifact has no reduced variant");
  }
  return sys;
}

RomBuildResult build_rom_offline(const RunConfig& cfg) {
  Problem problem = make_problem(cfg);
  const fs::path dir(cfg.output_directory);
  const SnapshotSet states = read_snapshot_file((dir / "states.snap").string());
  const SnapshotSet nonlin =
      read_snapshot_file((dir / "nonlinearity.snap").string());
  if (states.kind != SnapshotKind::state || nonlin.kind != SnapshotKind::nonlinearity) {
    throw ConfigError("build_rom_offline: snapshot content tags are swapped");
  }

  RomBuildResult out;
  const auto t0 = std::chrono::steady_clock::now();
  out.artifact = build_artifact(cfg, *problem.ops, states, nonlin);
  out.offline_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  out.artifact_path = (dir / "rom.artifact").string();
  write_rom_artifact(out.artifact_path, out.artifact);

  json sv = json::array();
  for (long i = 0; i < out.artifact.state_singular_values.size(); ++i) {
    sv.push_back(out.artifact.state_singular_values(i));
  }
  json nsv = json::array();
  for (long i = 0; i < out.artifact.nonlinearity_singular_values.size(); ++i) {
    nsv.push_back(out.artifact.nonlinearity_singular_values(i));
  }
  out.meta_path = (dir / "rom_build_meta.json").string();
  write_json(out.meta_path, json{{"variant", static_cast<int>(out.artifact.variant)},
                                 {"corrected", out.artifact.corrected},
                                 {"k", out.artifact.k},
                                 {"m", out.artifact.m},
                                 {"seed", out.artifact.seed},
                                 {"energy_fraction", out.artifact.energy_fraction},
                                 {"offline_seconds", out.offline_seconds},
                                 {"state_singular_values", sv},
                                 {"nonlinearity_singular_values", nsv}});
  return out;
}

RomRunResult run_rom_online(const RunConfig& cfg) {
  if (cfg.rom == RomKind::none) {
    throw ConfigError("run_rom_online: config requests no reduced model");
  }
  Problem problem = make_problem(cfg);
  const fs::path dir(cfg.output_directory);
  const RomArtifact artifact = read_rom_artifact((dir / "rom.artifact").string());
  if (artifact.variant != cfg.rom) {
    throw ConfigError("run_rom_online: artifact variant does not match config");
  }
  const RomSystem sys = rom_system_from_artifact(artifact, *problem.ops);

  const TimeGrid grid = TimeGrid::from(cfg.tau, cfg.horizon);
  const Eigen::VectorXd zr0 = sys.restrict_state(problem.initial_state);
  const RomIntegrationResult result =
      integrate_rom(sys, zr0, grid, problem.newton(cfg), make_error_probe(problem));

  RomRunResult out;
  out.invariants = result.invariants;
  out.reduced_trajectory = result.trajectory;
  out.online_seconds = result.step_seconds;
  out.steps = result.steps;
  out.newton_iterations = result.newton_iterations;
  out.stats = result.stats;

  out.invariants_path = (dir / "rom_invariants.csv").string();
  write_invariants_csv(out.invariants_path, out.invariants, sys.k());
  out.trajectory_path = (dir / "rom_trajectory.snap").string();
  write_snapshot_file(out.trajectory_path, out.reduced_trajectory, cfg.tau,
                      SnapshotKind::state);
  out.meta_path = (dir / "rom_run_meta.json").string();
  write_json(out.meta_path,
             json{{"variant", static_cast<int>(cfg.rom)},
                  {"k", sys.k()},
                  {"online_seconds", out.online_seconds},
                  {"newton_iterations", out.newton_iterations},
                  {"full_nonlinear_evals", out.stats.full_nonlinear_evals},
                  {"sampled_entries", out.stats.sampled_entries},
                  {"elements_touched", out.stats.elements_touched},
                  {"mass_drift", out.invariants.mass_drift()},
                  {"energy_drift", out.invariants.energy_drift()}});
  return out;
}

std::vector<SweepRow> sweep_modes(const RunConfig& cfg,
                                  const std::vector<int>& mode_counts,
                                  std::string* csv_path) {
  Problem problem = make_problem(cfg);
  const fs::path dir(cfg.output_directory);
  const SnapshotSet states = read_snapshot_file((dir / "states.snap").string());
  const SnapshotSet nonlin =
      read_snapshot_file((dir / "nonlinearity.snap").string());

  PodSelection selection{cfg.pod_rank, cfg.energy_threshold};
  const PodBasis basis =
      pod_basis(states, problem.ops->mass(), selection, cfg.oversampling,
                derive_seed(cfg.seed, kPodSalt));

  const TimeGrid grid = TimeGrid::from(cfg.tau, cfg.horizon);
  const Eigen::VectorXd zr0 = [&] {
    RomSystem plain = build_rom(basis, *problem.ops);
    return plain.restrict_state(problem.initial_state);
  }();

  std::vector<SweepRow> rows;
  for (const char* reducer_name : {"deim", "dmd"}) {
    const bool is_deim = std::string(reducer_name) == "deim";
    for (int m : mode_counts) {
      Reducer reducer;
      if (is_deim) {
        const long maxm = std::min(nonlin.columns.rows(), nonlin.columns.cols());
        if (m > maxm) {
          throw ConfigError("sweep_modes: m exceeds the snapshot rank bound");
        }
        const int p = static_cast<int>(std::min<long>(cfg.oversampling, maxm - m));
        const SvdResult svd = rsvd(nonlin.columns, m, std::max(p, 0),
                                   derive_seed(cfg.seed, kDeimSalt));
        reducer = make_deim_interpolant(svd.left);
      } else {
        const long cols = nonlin.columns.cols();
        reducer = dmd_fit(nonlin.columns.leftCols(cols - 1),
                          nonlin.columns.rightCols(cols - 1), nonlin.dt, m,
                          cfg.oversampling, derive_seed(cfg.seed, kDmdSalt));
      }
      const RomSystem sys =
          build_rom(basis, *problem.ops, std::move(reducer), !cfg.uncorrected_jr);
      const RomIntegrationResult run =
          integrate_rom(sys, zr0, grid, problem.newton(cfg));

      // Compare lifted states against the stored FOM snapshots at their times.
      Eigen::MatrixXd lifted(states.columns.rows(), states.columns.cols());
      for (long c = 0; c < states.columns.cols(); ++c) {
        lifted.col(c) = sys.lift(run.trajectory.col(c * cfg.snapshot_stride));
      }
      SweepRow row;
      row.reducer = reducer_name;
      row.m = m;
      row.l2l2_error = relative_l2l2_error(lifted, states.columns, problem.ops->mass());
      row.energy_drift = run.invariants.energy_drift();
      row.mass_drift = run.invariants.mass_drift();
      rows.push_back(row);
    }
  }

  const std::string path = (dir / "sweep.csv").string();
  CsvWriter csv(path, {"reducer", "m", "l2l2_error", "energy_drift", "mass_drift"});
  for (const SweepRow& row : rows) {
    csv.row_with_label(row.reducer, {static_cast<double>(row.m), row.l2l2_error,
                                     row.energy_drift, row.mass_drift});
  }
  if (csv_path) *csv_path = path;
  return rows;
}

std::vector<BenchRow> bench(const RunConfig& cfg, int repeat, std::string* csv_path) {
  if (repeat < 1) throw ConfigError("bench: repeat must be >= 1");
  RunConfig fom_cfg = cfg;
  const FomRunResult fom = run_fom(fom_cfg);

  std::vector<BenchRow> rows;
  rows.push_back({"fom", fom.solve_seconds, 1.0});

  for (RomKind kind : {RomKind::pod_deim, RomKind::pod_dmd}) {
    RunConfig rom_cfg = cfg;
    rom_cfg.rom = kind;
    build_rom_offline(rom_cfg);
    std::vector<double> times(repeat);
    for (int r = 0; r < repeat; ++r) times[r] = run_rom_online(rom_cfg).online_seconds;
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    rows.push_back({kind == RomKind::pod_deim ? "pod_deim" : "pod_dmd", median,
                    fom.solve_seconds / median});
  }

  const std::string path =
      (fs::path(cfg.output_directory) / "bench.csv").string();
  CsvWriter csv(path, {"variant", "seconds", "speedup"});
  for (const BenchRow& row : rows) {
    csv.row_with_label(row.label, {row.seconds, row.speedup});
  }
  if (csv_path) *csv_path = path;
  return rows;
}

}  // namespace hrom

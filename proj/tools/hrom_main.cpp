// Command line front end: full-order runs, reduced-model builds and runs,
// mode sweeps, and timing comparisons. Configs are files or the shipped
// presets "example1" / "example2".

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrom/config.hpp"
#include "hrom/diagnostics.hpp"
#include "hrom/errors.hpp"
#include "hrom/runner.hpp"

namespace {

hrom::RunConfig load_config(const std::string& spec) {
  hrom::RunConfig cfg = hrom::RunConfig::load(spec);
  if (cfg.initial == hrom::InitialKind::plane_wave) {
    hrom::PlaneWave wave{cfg.amplitude, cfg.c1, cfg.c2, 0.0};
    if (!hrom::plane_wave_periodic_on(wave, cfg.xmax - cfg.xmin,
                                      cfg.ymax - cfg.ymin)) {
      std::fprintf(stderr,
                   "warning: plane wave is not periodic on the domain box; "
                   "boundary identification will introduce jumps\n");
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving solver and reduced-order models for the "
               "2D nonlinear Schrodinger equation"};
  app.require_subcommand(1);

  std::string config_spec;
  std::vector<int> modes;
  int repeat = 1;

  auto* fom = app.add_subcommand("fom", "Full-order model");
  auto* fom_run = fom->add_subcommand("run", "Integrate the full-order model");
  fom_run->add_option("config", config_spec, "Config file or preset name")->required();

  auto* rom = app.add_subcommand("rom", "Reduced-order model");
  auto* rom_build =
      rom->add_subcommand("build", "Offline stage: basis, reducer, operators");
  rom_build->add_option("config", config_spec, "Config file or preset name")->required();
  auto* rom_run = rom->add_subcommand("run", "Online stage: integrate the ROM");
  rom_run->add_option("config", config_spec, "Config file or preset name")->required();

  auto* sweep = app.add_subcommand("sweep", "Error sweep over DEIM/DMD mode counts");
  sweep->add_option("config", config_spec, "Config file or preset name")->required();
  sweep->add_option("--modes", modes, "Mode counts, e.g. --modes 5 10 15")
      ->delimiter(',');

  auto* bench_cmd = app.add_subcommand("bench", "Time FOM vs ROM online stages");
  bench_cmd->add_option("config", config_spec, "Config file or preset name")->required();
  bench_cmd->add_option("--repeat", repeat, "ROM repetitions; median reported");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fom_run->parsed()) {
      const hrom::FomRunResult r = hrom::run_fom(load_config(config_spec));
      std::printf("fom: %ld steps in %.3f s, mass drift %.3e, energy drift %.3e\n",
                  r.steps, r.solve_seconds, r.invariants.mass_drift(),
                  r.invariants.energy_drift());
      std::printf("wrote %s\n", r.invariants_path.c_str());
    } else if (rom_build->parsed()) {
      const hrom::RomBuildResult r = hrom::build_rom_offline(load_config(config_spec));
      std::printf("rom build: k = %u, m = %u, energy fraction %.6f (%.3f s)\n",
                  r.artifact.k, r.artifact.m, r.artifact.energy_fraction,
                  r.offline_seconds);
      std::printf("wrote %s\n", r.artifact_path.c_str());
    } else if (rom_run->parsed()) {
      const hrom::RomRunResult r = hrom::run_rom_online(load_config(config_spec));
      std::printf("rom: %ld steps in %.4f s, mass drift %.3e, energy drift %.3e\n",
                  r.steps, r.online_seconds, r.invariants.mass_drift(),
                  r.invariants.energy_drift());
      std::printf("wrote %s\n", r.invariants_path.c_str());
    } else if (sweep->parsed()) {
      std::string csv;
      const auto rows = hrom::sweep_modes(load_config(config_spec), modes, &csv);
      for (const auto& row : rows) {
        std::printf("%-5s m=%-3d l2l2=%.3e energy_drift=%.3e mass_drift=%.3e\n",
                    row.reducer.c_str(), row.m, row.l2l2_error, row.energy_drift,
                    row.mass_drift);
      }
      std::printf("wrote %s\n", csv.c_str());
    } else if (bench_cmd->parsed()) {
      std::string csv;
      const auto rows = hrom::bench(load_config(config_spec), repeat, &csv);
      for (const auto& row : rows) {
        std::printf("%-10s %10.4f s  speedup %8.1fx\n", row.label.c_str(),
                    row.seconds, row.speedup);
      }
      std::printf("wrote %s\n", csv.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

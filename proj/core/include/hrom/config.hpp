#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hrom {

enum class PotentialKind : std::uint8_t { none = 0, harmonic = 1 };
enum class InitialKind : std::uint8_t { plane_wave = 0, gaussian = 1 };
enum class RomKind : std::uint8_t { none = 0, pod = 1, pod_deim = 2, pod_dmd = 3 };

/// Flat sectioned key-value experiment description. Parsing and serialization
/// round-trip exactly; unknown keys are rejected.
struct RunConfig {
  // [domain]
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  int nx = 8, ny = 8;
  // [space]
  int degree = 1;
  // [physics]
  double alpha = 1.0;
  double beta = 0.0;
  double kappa = 10.0;
  PotentialKind potential = PotentialKind::none;
  double gamma_x = 0.0, gamma_y = 0.0;  // V = 0.5 (gamma_x x^2 + gamma_y y^2)
  // [initial]
  InitialKind initial = InitialKind::plane_wave;
  double amplitude = 1.0;
  double c1 = 1.0, c2 = 1.0;
  std::optional<double> omega_override;
  // [time]
  double tau = 0.01;
  double horizon = 1.0;
  bool backward_euler = false;
  // [rom]
  RomKind rom = RomKind::none;
  std::optional<int> pod_rank;
  std::optional<double> energy_threshold;
  int hyper_modes = 15;
  long snapshot_stride = 1;
  bool uncorrected_jr = false;
  // [lowrank]
  int oversampling = 2;
  std::uint64_t seed = 20240817;
  // [newton]
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 50;
  // [output]
  std::string output_directory = "out";

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError with the offending key on invalid combinations.
  void validate() const;

  std::string serialize() const;
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path_or_preset);

  /// Shipped presets: "example1" (plane wave, defocusing, no potential) and
  /// "example2" (Gaussian in a harmonic trap).
  static RunConfig preset(const std::string& name);
  static bool is_preset(const std::string& name);
};

}  // namespace hrom

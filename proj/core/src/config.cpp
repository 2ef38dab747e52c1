#include "hrom/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad seed for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

void RunConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(xmax > xmin) || !(ymax > ymin)) throw ConfigError("config: empty domain box");
  if (nx < 2 || ny < 2) throw ConfigError("config: nx and ny must be at least 2");
  if (degree < 1) throw ConfigError("config: space.degree must be >= 1");
  if (!finite(alpha) || !finite(beta)) throw ConfigError("config: non-finite physics");
  if (!(kappa > 0.0)) throw ConfigError("config: kappa must be positive");
  if (potential == PotentialKind::harmonic && (!finite(gamma_x) || !finite(gamma_y))) {
    throw ConfigError("config: non-finite harmonic coefficients");
  }
  if (!(tau > 0.0)) throw ConfigError("config: tau must be positive");
  if (!(horizon >= 0.0)) throw ConfigError("config: T must be nonnegative");
  if (rom != RomKind::none && !pod_rank && !energy_threshold) {
    throw ConfigError("config: rom requires k or energy_threshold");
  }
  if (pod_rank && *pod_rank < 1) throw ConfigError("config: k must be >= 1");
  if (energy_threshold && !(*energy_threshold > 0.0 && *energy_threshold <= 1.0)) {
    throw ConfigError("config: energy_threshold must lie in (0, 1]");
  }
  if (hyper_modes < 1) throw ConfigError("config: m must be >= 1");
  if (snapshot_stride < 1) throw ConfigError("config: snapshot_stride must be >= 1");
  if (oversampling < 0) throw ConfigError("config: oversampling must be >= 0");
  if (!(newton_tolerance > 0.0)) throw ConfigError("config: newton tolerance must be positive");
  if (newton_max_iterations < 1) throw ConfigError("config: newton max_iterations must be >= 1");
  if (output_directory.empty()) throw ConfigError("config: output directory is empty");
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  out << "[domain]\n";
  out << "xmin = " << fmt(xmin) << "\n";
  out << "xmax = " << fmt(xmax) << "\n";
  out << "ymin = " << fmt(ymin) << "\n";
  out << "ymax = " << fmt(ymax) << "\n";
  out << "nx = " << nx << "\n";
  out << "ny = " << ny << "\n";
  out << "\n[space]\n";
  out << "degree = " << degree << "\n";
  out << "\n[physics]\n";
  out << "alpha = " << fmt(alpha) << "\n";
  out << "beta = " << fmt(beta) << "\n";
  out << "kappa = " << fmt(kappa) << "\n";
  out << "potential = " << (potential == PotentialKind::none ? "none" : "harmonic")
      << "\n";
  if (potential == PotentialKind::harmonic) {
    out << "gamma_x = " << fmt(gamma_x) << "\n";
    out << "gamma_y = " << fmt(gamma_y) << "\n";
  }
  out << "\n[initial]\n";
  out << "type = "
      << (initial == InitialKind::plane_wave ? "plane_wave" : "gaussian") << "\n";
  if (initial == InitialKind::plane_wave) {
    out << "amplitude = " << fmt(amplitude) << "\n";
    out << "c1 = " << fmt(c1) << "\n";
    out << "c2 = " << fmt(c2) << "\n";
    if (omega_override) out << "omega = " << fmt(*omega_override) << "\n";
  }
  out << "\n[time]\n";
  out << "tau = " << fmt(tau) << "\n";
  out << "T = " << fmt(horizon) << "\n";
  out << "integrator = " << (backward_euler ? "backward_euler" : "avf") << "\n";
  out << "\n[rom]\n";
  const char* romname = rom == RomKind::none       ? "none"
                        : rom == RomKind::pod      ? "pod"
                        : rom == RomKind::pod_deim ? "pod_deim"
                                                   : "pod_dmd";
  out << "variant = " << romname << "\n";
  if (pod_rank) out << "k = " << *pod_rank << "\n";
  if (energy_threshold) out << "energy_threshold = " << fmt(*energy_threshold) << "\n";
  out << "m = " << hyper_modes << "\n";
  out << "snapshot_stride = " << snapshot_stride << "\n";
  out << "uncorrected_jr = " << (uncorrected_jr ? "true" : "false") << "\n";
  out << "\n[lowrank]\n";
  out << "oversampling = " << oversampling << "\n";
  out << "seed = " << seed << "\n";
  out << "\n[newton]\n";
  out << "tolerance = " << fmt(newton_tolerance) << "\n";
  out << "max_iterations = " << newton_max_iterations << "\n";
  out << "\n[output]\n";
  out << "directory = " << output_directory << "\n";
  return out.str();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string id = section + "." + key;

    if (id == "domain.xmin") cfg.xmin = to_double(id, value);
    else if (id == "domain.xmax") cfg.xmax = to_double(id, value);
    else if (id == "domain.ymin") cfg.ymin = to_double(id, value);
    else if (id == "domain.ymax") cfg.ymax = to_double(id, value);
    else if (id == "domain.nx") cfg.nx = static_cast<int>(to_long(id, value));
    else if (id == "domain.ny") cfg.ny = static_cast<int>(to_long(id, value));
    else if (id == "space.degree") cfg.degree = static_cast<int>(to_long(id, value));
    else if (id == "physics.alpha") cfg.alpha = to_double(id, value);
    else if (id == "physics.beta") cfg.beta = to_double(id, value);
    else if (id == "physics.kappa") cfg.kappa = to_double(id, value);
    else if (id == "physics.potential") {
      if (value == "none") cfg.potential = PotentialKind::none;
      else if (value == "harmonic") cfg.potential = PotentialKind::harmonic;
      else throw ConfigError("config: unknown potential: " + value);
    } else if (id == "physics.gamma_x") cfg.gamma_x = to_double(id, value);
    else if (id == "physics.gamma_y") cfg.gamma_y = to_double(id, value);
    else if (id == "initial.type") {
      if (value == "plane_wave") cfg.initial = InitialKind::plane_wave;
      else if (value == "gaussian") cfg.initial = InitialKind::gaussian;
      else throw ConfigError("config: unknown initial condition: " + value);
    } else if (id == "initial.amplitude") cfg.amplitude = to_double(id, value);
    else if (id == "initial.c1") cfg.c1 = to_double(id, value);
    else if (id == "initial.c2") cfg.c2 = to_double(id, value);
    else if (id == "initial.omega") cfg.omega_override = to_double(id, value);
    else if (id == "time.tau") cfg.tau = to_double(id, value);
    else if (id == "time.T") cfg.horizon = to_double(id, value);
    else if (id == "time.integrator") {
      if (value == "avf") cfg.backward_euler = false;
      else if (value == "backward_euler") cfg.backward_euler = true;
      else throw ConfigError("config: unknown integrator: " + value);
    } else if (id == "rom.variant") {
      if (value == "none") cfg.rom = RomKind::none;
      else if (value == "pod") cfg.rom = RomKind::pod;
      else if (value == "pod_deim") cfg.rom = RomKind::pod_deim;
      else if (value == "pod_dmd") cfg.rom = RomKind::pod_dmd;
      else throw ConfigError("config: unknown rom variant: " + value);
    } else if (id == "rom.k") cfg.pod_rank = static_cast<int>(to_long(id, value));
    else if (id == "rom.energy_threshold") cfg.energy_threshold = to_double(id, value);
    else if (id == "rom.m") cfg.hyper_modes = static_cast<int>(to_long(id, value));
    else if (id == "rom.snapshot_stride") cfg.snapshot_stride = to_long(id, value);
    else if (id == "rom.uncorrected_jr") cfg.uncorrected_jr = to_bool(id, value);
    else if (id == "lowrank.oversampling") cfg.oversampling = static_cast<int>(to_long(id, value));
    else if (id == "lowrank.seed") cfg.seed = to_u64(id, value);
    else if (id == "newton.tolerance") cfg.newton_tolerance = to_double(id, value);
    else if (id == "newton.max_iterations") cfg.newton_max_iterations = static_cast<int>(to_long(id, value));
    else if (id == "output.directory") cfg.output_directory = value;
    else throw ConfigError("config: unknown key: " + id);
  }
  cfg.validate();
  return cfg;
}

bool RunConfig::is_preset(const std::string& name) {
  return name == "example1" || name == "example2";
}

RunConfig RunConfig::preset(const std::string& name) {
  RunConfig cfg;
  if (name == "example1") {
    // Defocusing plane wave on [0, 2pi]^2.
    cfg.xmin = 0.0;
    cfg.xmax = 2.0 * M_PI;
    cfg.ymin = 0.0;
    cfg.ymax = 2.0 * M_PI;
    cfg.nx = 32;
    cfg.ny = 32;
    cfg.alpha = 2.0;
    cfg.beta = 2.0;
    cfg.kappa = 10.0;
    cfg.potential = PotentialKind::none;
    cfg.initial = InitialKind::plane_wave;
    cfg.amplitude = 1.0;
    cfg.c1 = 1.0;
    cfg.c2 = 1.0;
    cfg.tau = 0.001;
    cfg.horizon = 5.0;
    cfg.rom = RomKind::pod_deim;
    cfg.energy_threshold = 0.9999;
    cfg.hyper_modes = 15;
    cfg.output_directory = "out/example1";
    return cfg;
  }
  if (name == "example2") {
    // Gaussian in the harmonic trap V = (x^2 + 4 y^2) / 2 on [-8, 8]^2.
    cfg.xmin = -8.0;
    cfg.xmax = 8.0;
    cfg.ymin = -8.0;
    cfg.ymax = 8.0;
    cfg.nx = 32;
    cfg.ny = 32;
    cfg.alpha = 0.5;
    cfg.beta = 1.0;
    cfg.kappa = 10.0;
    cfg.potential = PotentialKind::harmonic;
    cfg.gamma_x = 1.0;
    cfg.gamma_y = 4.0;
    cfg.initial = InitialKind::gaussian;
    cfg.tau = 0.01;
    cfg.horizon = 3.0;
    cfg.rom = RomKind::pod_deim;
    cfg.pod_rank = 20;
    cfg.hyper_modes = 20;
    cfg.output_directory = "out/example2";
    return cfg;
  }
  throw ConfigError("unknown preset: " + name);
}

RunConfig RunConfig::load(const std::string& path_or_preset) {
  if (std::filesystem::exists(path_or_preset)) {
    std::ifstream in(path_or_preset);
    if (!in) throw IoError("cannot open config file: " + path_or_preset);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
  }
  if (is_preset(path_or_preset)) return preset(path_or_preset);
  throw ConfigError("config not found (no such file or preset): " + path_or_preset);
}

}  // namespace hrom

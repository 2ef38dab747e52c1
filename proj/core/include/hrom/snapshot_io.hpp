#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <string>
#include <vector>

#include "hrom/config.hpp"
#include "hrom/lowrank.hpp"

namespace hrom {

/// Binary snapshot container: magic "HROM1", u32 version, u64 rows, u64 cols,
/// f64 dt, u8 content tag (0 = state, 1 = nonlinearity), then column-major
/// little-endian f64 payload. Round trips are bit exact.
void write_snapshot_file(const std::string& path, const Eigen::MatrixXd& data,
                         double dt, SnapshotKind kind);

SnapshotSet read_snapshot_file(const std::string& path);

/// Self-contained reduced model: basis, reduced operators, reducer data, and
/// build provenance (seed, k, m, achieved energy fraction, spectra).
struct RomArtifact {
  RomKind variant = RomKind::pod;
  bool corrected = true;
  std::uint32_t k = 0;
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
  double energy_fraction = 0.0;
  double dt = 0.0;
  Eigen::VectorXd state_singular_values;
  Eigen::VectorXd nonlinearity_singular_values;
  Eigen::MatrixXd basis;              // U
  Eigen::MatrixXd jr;                 // J_r
  Eigen::MatrixXd reduced_stiffness;  // S
  Eigen::MatrixXd ar;                 // A^r
  // DEIM data
  Eigen::MatrixXd deim_basis;
  std::vector<long> deim_indices;
  Eigen::MatrixXd deim_combination;
  // DMD data
  Eigen::MatrixXcd dmd_modes;
  Eigen::VectorXcd dmd_eigenvalues;
  Eigen::VectorXcd dmd_omega;
  Eigen::VectorXcd dmd_amplitudes;
};

void write_rom_artifact(const std::string& path, const RomArtifact& artifact);
RomArtifact read_rom_artifact(const std::string& path);

/// CSV with floats printed to 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_with_label(const std::string& label, const std::vector<double>& values);

 private:
  std::ofstream out_;
};

}  // namespace hrom

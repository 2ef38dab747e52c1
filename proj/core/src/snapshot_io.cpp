#include "hrom/snapshot_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "hrom/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot containers are little-endian");

namespace hrom {

namespace {

constexpr char kSnapshotMagic[5] = {'H', 'R', 'O', 'M', '1'};
constexpr char kArtifactMagic[8] = {'H', 'R', 'O', 'M', 'R', 'O', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated file: " + path);
  return value;
}

void put_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd get_matrix(std::ifstream& in, const std::string& path) {
  const auto rows = get<std::uint64_t>(in, path);
  const auto cols = get<std::uint64_t>(in, path);
  Eigen::MatrixXd m(static_cast<long>(rows), static_cast<long>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw IoError("truncated matrix in " + path);
  return m;
}

void put_complex(std::ofstream& out, const Eigen::MatrixXcd& m) {
  put_matrix(out, m.real());
  put_matrix(out, m.imag());
}

Eigen::MatrixXcd get_complex(std::ifstream& in, const std::string& path) {
  const Eigen::MatrixXd re = get_matrix(in, path);
  const Eigen::MatrixXd im = get_matrix(in, path);
  return re + std::complex<double>(0, 1) * im;
}

}  // namespace

void write_snapshot_file(const std::string& path, const Eigen::MatrixXd& data,
                         double dt, SnapshotKind kind) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(data.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(data.cols()));
  put<double>(out, dt);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!out) throw IoError("write failed: " + path);
}

SnapshotSet read_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw IoError("bad snapshot magic in " + path);
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw IoError("unsupported snapshot version in " + path);
  const auto rows = get<std::uint64_t>(in, path);
  const auto cols = get<std::uint64_t>(in, path);
  SnapshotSet set;
  set.dt = get<double>(in, path);
  const auto tag = get<std::uint8_t>(in, path);
  if (tag > 1) throw IoError("bad content tag in " + path);
  set.kind = static_cast<SnapshotKind>(tag);
  set.columns.resize(static_cast<long>(rows), static_cast<long>(cols));
  in.read(reinterpret_cast<char*>(set.columns.data()),
          static_cast<std::streamsize>(sizeof(double) * set.columns.size()));
  if (!in) throw IoError("truncated payload in " + path);
  return set;
}

void write_rom_artifact(const std::string& path, const RomArtifact& a) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kArtifactMagic, sizeof(kArtifactMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(a.variant));
  put<std::uint8_t>(out, a.corrected ? 1 : 0);
  put<std::uint32_t>(out, a.k);
  put<std::uint32_t>(out, a.m);
  put<std::uint64_t>(out, a.seed);
  put<double>(out, a.energy_fraction);
  put<double>(out, a.dt);
  put_matrix(out, a.state_singular_values);
  put_matrix(out, a.nonlinearity_singular_values);
  put_matrix(out, a.basis);
  put_matrix(out, a.jr);
  put_matrix(out, a.reduced_stiffness);
  put_matrix(out, a.ar);
  put_matrix(out, a.deim_basis);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(a.deim_indices.size()));
  for (long idx : a.deim_indices) put<std::int64_t>(out, idx);
  put_matrix(out, a.deim_combination);
  put_complex(out, a.dmd_modes);
  put_complex(out, a.dmd_eigenvalues);
  put_complex(out, a.dmd_omega);
  put_complex(out, a.dmd_amplitudes);
  if (!out) throw IoError("write failed: " + path);
}

RomArtifact read_rom_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kArtifactMagic, sizeof(magic)) != 0) {
    throw IoError("bad artifact magic in " + path);
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw IoError("unsupported artifact version in " + path);
  RomArtifact a;
  a.variant = static_cast<RomKind>(get<std::uint8_t>(in, path));
  a.corrected = get<std::uint8_t>(in, path) != 0;
  a.k = get<std::uint32_t>(in, path);
  a.m = get<std::uint32_t>(in, path);
  a.seed = get<std::uint64_t>(in, path);
  a.energy_fraction = get<double>(in, path);
  a.dt = get<double>(in, path);
  a.state_singular_values = get_matrix(in, path);
  a.nonlinearity_singular_values = get_matrix(in, path);
  a.basis = get_matrix(in, path);
  a.jr = get_matrix(in, path);
  a.reduced_stiffness = get_matrix(in, path);
  a.ar = get_matrix(in, path);
  a.deim_basis = get_matrix(in, path);
  const auto n_idx = get<std::uint64_t>(in, path);
  a.deim_indices.resize(n_idx);
  for (auto& idx : a.deim_indices) idx = static_cast<long>(get<std::int64_t>(in, path));
  a.deim_combination = get_matrix(in, path);
  a.dmd_modes = get_complex(in, path);
  a.dmd_eigenvalues = get_complex(in, path);
  a.dmd_omega = get_complex(in, path);
  a.dmd_amplitudes = get_complex(in, path);
  return a;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc) {
  if (!out_) throw IoError("cannot open for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  char buf[64];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out_ << buf << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::row_with_label(const std::string& label,
                               const std::vector<double>& values) {
  out_ << label << (values.empty() ? "\n" : ",");
  row(values);
}

}  // namespace hrom

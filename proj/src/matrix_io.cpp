#include "sopinf/matrix_io.hpp"

#include "sopinf/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace sopinf {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary matrix format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'O', 'P', 'F'};
constexpr std::uint32_t kDtypeF64 = 1;

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void require_artifact(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingArtifact, "expected file " + path.string());
}

void write_matrix_bin(const fs::path& path, const Matrix& A) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  if (A.rows() > std::numeric_limits<std::uint32_t>::max() || A.cols() > std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::InvalidArgument, "matrix too large for the binary format");
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(A.rows()));
  put_u32(os, static_cast<std::uint32_t>(A.cols()));
  put_u32(os, kDtypeF64);
  os.write(reinterpret_cast<const char*>(A.data()), static_cast<std::streamsize>(A.size() * sizeof(double)));
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Matrix read_matrix_bin(const fs::path& path) {
  require_artifact(path);
  std::ifstream is(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::IoError, path.string() + " is not a SOPF matrix file");
  const std::uint32_t rows = get_u32(is);
  const std::uint32_t cols = get_u32(is);
  const std::uint32_t dtype = get_u32(is);
  if (!is || dtype != kDtypeF64) throw Error(ErrorCode::IoError, path.string() + ": unsupported dtype");
  Matrix A(rows, cols);
  is.read(reinterpret_cast<char*>(A.data()), static_cast<std::streamsize>(A.size() * sizeof(double)));
  if (!is) throw Error(ErrorCode::IoError, path.string() + ": truncated data");
  return A;
}

void write_matrix_csv(const fs::path& path, const Matrix& A) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (Index j = 0; j < A.cols(); ++j) os << (j ? "," : "") << 'c' << j;
  os << '\n';
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) os << (j ? "," : "") << format_double(A(i, j));
    os << '\n';
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  require_artifact(path);
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw Error(ErrorCode::IoError, path.string() + ": bad number");
      row.push_back(v);
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    }
    rows.push_back(std::move(row));
  }
  const Index cols = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix A(static_cast<Index>(rows.size()), cols);
  for (Index i = 0; i < A.rows(); ++i) {
    if (static_cast<Index>(rows[i].size()) != cols) throw Error(ErrorCode::IoError, path.string() + ": ragged rows");
    for (Index j = 0; j < cols; ++j) A(i, j) = rows[i][j];
  }
  return A;
}

void write_snapshots(const fs::path& dir, const SnapshotSet& s, bool with_csv) {
  write_matrix_bin(dir / "times.bin", s.times);
  write_matrix_bin(dir / "U.bin", s.U);
  write_matrix_bin(dir / "X.bin", s.X);
  write_matrix_bin(dir / "Xd.bin", s.Xd);
  write_matrix_bin(dir / "Xdd.bin", s.Xdd);
  if (!with_csv) return;
  write_matrix_csv(dir / "times.csv", s.times);
  write_matrix_csv(dir / "U.csv", s.U.transpose());
  write_matrix_csv(dir / "X.csv", s.X.transpose());
  write_matrix_csv(dir / "Xd.csv", s.Xd.transpose());
  write_matrix_csv(dir / "Xdd.csv", s.Xdd.transpose());
}

SnapshotSet read_snapshots(const fs::path& dir) {
  SnapshotSet s;
  Matrix t = read_matrix_bin(dir / "times.bin");
  s.times = Eigen::Map<Vector>(t.data(), t.size());
  s.U = read_matrix_bin(dir / "U.bin");
  s.X = read_matrix_bin(dir / "X.bin");
  s.Xd = read_matrix_bin(dir / "Xd.bin");
  s.Xdd = read_matrix_bin(dir / "Xdd.bin");
  validate_snapshots(s);
  return s;
}

void write_rom(const fs::path& dir, const StructuredROM& rom) {
  write_matrix_bin(dir / "Mr.bin", rom.Mr);
  write_matrix_bin(dir / "Dr.bin", rom.Dr);
  write_matrix_bin(dir / "Gr.bin", rom.Gr);
  write_matrix_bin(dir / "Kr.bin", rom.Kr);
  write_matrix_bin(dir / "Br.bin", rom.Br);
  write_matrix_bin(dir / "V.bin", rom.basis);
  Matrix meta(1, 2);
  meta << rom.omega_train, rom.structure_guaranteed ? 1.0 : 0.0;
  write_matrix_bin(dir / "meta.bin", meta);
}

StructuredROM read_rom(const fs::path& dir) {
  StructuredROM rom;
  rom.Mr = read_matrix_bin(dir / "Mr.bin");
  rom.Dr = read_matrix_bin(dir / "Dr.bin");
  rom.Gr = read_matrix_bin(dir / "Gr.bin");
  rom.Kr = read_matrix_bin(dir / "Kr.bin");
  rom.Br = read_matrix_bin(dir / "Br.bin");
  rom.basis = read_matrix_bin(dir / "V.bin");
  Matrix meta = read_matrix_bin(dir / "meta.bin");
  if (meta.size() != 2) throw Error(ErrorCode::IoError, (dir / "meta.bin").string() + ": expected two entries");
  rom.omega_train = meta(0, 0);
  rom.structure_guaranteed = meta(0, 1) != 0.0;
  return rom;
}

void write_system(const fs::path& dir, const SecondOrderSystem& sys) {
  write_matrix_bin(dir / "M.bin", sys.M);
  write_matrix_bin(dir / "D.bin", sys.D);
  write_matrix_bin(dir / "G.bin", sys.G);
  write_matrix_bin(dir / "K.bin", sys.K);
  write_matrix_bin(dir / "B.bin", sys.B);
}

SecondOrderSystem read_system(const fs::path& dir) {
  SecondOrderSystem sys;
  sys.M = read_matrix_bin(dir / "M.bin");
  sys.D = read_matrix_bin(dir / "D.bin");
  sys.G = read_matrix_bin(dir / "G.bin");
  sys.K = read_matrix_bin(dir / "K.bin");
  sys.B = read_matrix_bin(dir / "B.bin");
  sys.has_gyro = sys.G.size() > 0 && sys.G.cwiseAbs().maxCoeff() > 0.0;
  return sys;
}

}  // namespace sopinf

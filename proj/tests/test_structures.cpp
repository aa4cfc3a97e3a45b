#include "sopinf/error.hpp"
#include "sopinf/matrix_io.hpp"
#include "sopinf/structures.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

using namespace sopinf;

namespace {

SecondOrderSystem identity_system(Index n) {
  SecondOrderSystem s;
  s.M = s.D = s.K = Matrix::Identity(n, n);
  s.G = Matrix::Zero(n, n);
  s.B = Matrix::Ones(n, 1);
  return s;
}

}  // namespace

TEST_CASE("identity system passes every invariant with unit eigenvalues") {
  const StructureReport rep = check_structure(identity_system(3));
  CHECK(rep.all_passed());
  for (const char* name : {"M", "D", "K"}) {
    CHECK(rep.at(name).min_eig == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.at(name).symmetry_defect == 0.0);
  }
}

TEST_CASE("asymmetric stiffness perturbation is reported with its Frobenius defect") {
  SecondOrderSystem s = identity_system(3);
  s.K(0, 1) += 1e-3;
  const StructureReport rep = check_structure(s);
  // K - K^T has +-1e-3 in two entries
  CHECK(rep.at("K").symmetry_defect == doctest::Approx(1e-3 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_FALSE(rep.at("K").passed);
  CHECK(rep.at("M").passed);
  CHECK_FALSE(rep.all_passed());
}

TEST_CASE("canonical skew gyroscopic matrix passes") {
  SecondOrderSystem s = identity_system(2);
  s.G << 0, 1, -1, 0;
  s.has_gyro = true;
  const StructureReport rep = check_structure(s);
  CHECK(rep.at("G").symmetry_defect == 0.0);
  CHECK(rep.all_passed());
}

TEST_CASE("nonzero G on a system flagged without gyroscopic terms fails") {
  SecondOrderSystem s = identity_system(2);
  s.G << 0, 1, -1, 0;
  CHECK_FALSE(check_structure(s).at("G").passed);
}

TEST_CASE("indefinite stiffness and negative damping fail") {
  SecondOrderSystem s = identity_system(2);
  s.K(1, 1) = -1.0;
  CHECK_FALSE(check_structure(s).at("K").passed);
  s = identity_system(2);
  s.D(0, 0) = -0.5;
  CHECK_FALSE(check_structure(s).at("D").passed);
  s = identity_system(2);
  s.D.setZero();
  CHECK(check_structure(s).at("D").passed);
}

TEST_CASE("non-finite entries raise NonFinite") {
  SecondOrderSystem s = identity_system(2);
  s.M(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    check_structure(s);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("ROM skew check has zero tolerance") {
  StructuredROM rom;
  rom.Mr = rom.Dr = rom.Kr = Matrix::Identity(2, 2);
  rom.Gr = Matrix::Zero(2, 2);
  rom.Gr(0, 1) = 1.0;
  rom.Gr(1, 0) = -1.0;
  rom.Br = Matrix::Ones(2, 1);
  rom.basis = Matrix::Identity(2, 2);
  CHECK(check_structure(rom).all_passed());
  rom.Gr(1, 0) = -1.0 + 1e-15;
  CHECK_FALSE(check_structure(rom).at("G").passed);
}

TEST_CASE("ROM with a non-orthonormal basis fails the basis check") {
  StructuredROM rom;
  rom.Mr = rom.Dr = rom.Kr = Matrix::Identity(2, 2);
  rom.Gr = Matrix::Zero(2, 2);
  rom.Br = Matrix::Ones(2, 1);
  rom.basis = 1.001 * Matrix::Identity(3, 2);
  CHECK_FALSE(check_structure(rom).at("basis").passed);
}

TEST_CASE("E composition splits back into D and omega G") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix C = testutil::random_matrix(6, 6, rng);
    const Matrix S = testutil::random_matrix(6, 6, rng);
    const Matrix D = C * C.transpose();
    const Matrix G = S - S.transpose();
    const double omega = 10.0 * trial + 0.5;
    const Matrix E = compose_e(D, G, omega);
    auto [sym, skew] = split_e(E);
    CHECK((sym - D).norm() <= 1e-12 * D.norm());
    CHECK((skew - omega * G).norm() <= 1e-12 * (omega * G).norm());
  }
}

TEST_CASE("snapshot validation rejects mismatched or non-uniform data") {
  SnapshotSet s;
  s.times = Vector::LinSpaced(5, 0.0, 0.4);
  s.U = Matrix::Zero(1, 5);
  s.X = s.Xd = s.Xdd = Matrix::Zero(2, 5);
  CHECK_NOTHROW(validate_snapshots(s));
  s.times(3) += 1e-4;
  CHECK_THROWS_AS(validate_snapshots(s), Error);
  s.times = Vector::LinSpaced(5, 0.0, 0.4);
  s.Xd = Matrix::Zero(2, 4);
  CHECK_THROWS_AS(validate_snapshots(s), Error);
}

TEST_CASE("binary matrix files round-trip bitwise and carry the documented header") {
  testutil::TempDir dir("io");
  std::mt19937_64 rng(1);
  const Matrix A = testutil::random_matrix(3, 5, rng) * 1e7;
  const auto path = dir.path / "a.bin";
  write_matrix_bin(path, A);
  const std::string bytes = testutil::read_bytes(path);
  REQUIRE(bytes.size() == 16 + 8 * 15);
  CHECK(bytes.substr(0, 4) == "SOPF");
  std::uint32_t hdr[3];
  std::memcpy(hdr, bytes.data() + 4, 12);
  CHECK(hdr[0] == 3);
  CHECK(hdr[1] == 5);
  CHECK(hdr[2] == 1);
  // column-major: second stored value is A(1,0)
  double second;
  std::memcpy(&second, bytes.data() + 24, 8);
  CHECK(second == A(1, 0));
  const Matrix B = read_matrix_bin(path);
  CHECK(B == A);
}

TEST_CASE("CSV export has a c0,c1 header and round-trips exactly") {
  testutil::TempDir dir("csv");
  Matrix A(2, 3);
  A << 0.1, -2.5e-17, 3, 1.0 / 3.0, 1e300, -0.0;
  write_matrix_csv(dir.path / "a.csv", A);
  const std::string text = testutil::read_bytes(dir.path / "a.csv");
  CHECK(text.substr(0, 9) == "c0,c1,c2\n");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(read_matrix_csv(dir.path / "a.csv") == A);
}

TEST_CASE("reading a missing or corrupt artifact fails with the right kind") {
  testutil::TempDir dir("bad");
  try {
    read_matrix_bin(dir.path / "nope.bin");
    FAIL("expected MissingArtifact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingArtifact);
    CHECK(std::string(e.what()).find("nope.bin") != std::string::npos);
  }
  {
    std::ofstream os(dir.path / "junk.bin", std::ios::binary);
    os << "JUNKJUNKJUNKJUNK";
  }
  try {
    read_matrix_bin(dir.path / "junk.bin");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("ROM persistence keeps operators and metadata") {
  testutil::TempDir dir("rom");
  std::mt19937_64 rng(2);
  StructuredROM rom;
  rom.Mr = testutil::random_matrix(2, 2, rng);
  rom.Dr = testutil::random_matrix(2, 2, rng);
  rom.Gr = testutil::random_matrix(2, 2, rng);
  rom.Kr = testutil::random_matrix(2, 2, rng);
  rom.Br = testutil::random_matrix(2, 3, rng);
  rom.basis = testutil::random_matrix(5, 2, rng);
  rom.omega_train = 600.0;
  rom.structure_guaranteed = false;
  write_rom(dir.path, rom);
  const StructuredROM back = read_rom(dir.path);
  CHECK(back.Mr == rom.Mr);
  CHECK(back.Gr == rom.Gr);
  CHECK(back.Br == rom.Br);
  CHECK(back.basis == rom.basis);
  CHECK(back.omega_train == 600.0);
  CHECK_FALSE(back.structure_guaranteed);
}

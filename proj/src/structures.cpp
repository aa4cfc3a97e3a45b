#include "sopinf/structures.hpp"

#include "sopinf/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace sopinf {

Matrix SecondOrderSystem::damping_with_spin(double omega) const { return compose_e(D, G, omega); }

Matrix StructuredROM::damping_with_spin(double omega) const { return compose_e(Dr, Gr, omega); }

double SnapshotSet::dt() const {
  if (times.size() < 2) return 0.0;
  return times(1) - times(0);
}

void validate_snapshots(const SnapshotSet& s) {
  const Index N = s.size();
  if (s.U.cols() != N || s.X.cols() != N || s.Xd.cols() != N || s.Xdd.cols() != N)
    throw Error(ErrorCode::DimensionMismatch, "snapshot matrices disagree on the number of samples");
  if (s.Xd.rows() != s.X.rows() || s.Xdd.rows() != s.X.rows())
    throw Error(ErrorCode::DimensionMismatch, "state snapshot matrices disagree on the state dimension");
  if (N < 2) return;
  const double dt = s.dt();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "times must be strictly increasing");
  for (Index k = 1; k < N; ++k) {
    const double step = s.times(k) - s.times(k - 1);
    if (std::abs(step - dt) > 1e-12 * std::max(dt, std::abs(s.times(k))))
      throw Error(ErrorCode::InvalidArgument, "time grid is not uniform");
  }
}

Matrix compose_e(const Matrix& D, const Matrix& G, double omega) {
  if (omega == 0.0) return D;
  return D + omega * G;
}

std::pair<Matrix, Matrix> split_e(const Matrix& E) {
  Matrix sym = 0.5 * (E + E.transpose());
  Matrix skew = 0.5 * (E - E.transpose());
  return {sym, skew};
}

bool all_finite(const Matrix& A) { return A.allFinite(); }

void require_finite(const Matrix& A, const std::string& what) {
  if (!A.allFinite()) throw Error(ErrorCode::NonFinite, what + " contains NaN or Inf");
}

namespace {

InvariantCheck symmetric_check(const std::string& name, const Matrix& A, bool strictly_positive,
                               double psd_rel_tol, double sym_rel_tol) {
  InvariantCheck c;
  c.name = name;
  const double fro = A.norm();
  c.symmetry_defect = (A - A.transpose()).norm();
  if (A.rows() == 0) {
    c.passed = true;
    return c;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  c.min_eig = es.eigenvalues().minCoeff();
  c.max_eig = es.eigenvalues().maxCoeff();
  const bool sym_ok = c.symmetry_defect <= sym_rel_tol * fro;
  const bool eig_ok = strictly_positive ? c.min_eig > 0.0 : c.min_eig >= -psd_rel_tol * fro;
  c.passed = sym_ok && eig_ok;
  return c;
}

InvariantCheck skew_check(const std::string& name, const Matrix& G, double rel_tol) {
  InvariantCheck c;
  c.name = name;
  c.symmetry_defect = (G + G.transpose()).norm();
  c.passed = c.symmetry_defect <= rel_tol * G.norm();
  return c;
}

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;

}  // namespace

StructureReport check_structure(const SecondOrderSystem& sys) {
  for (const Matrix* A : {&sys.M, &sys.D, &sys.G, &sys.K, &sys.B}) require_finite(*A, "system operator");
  StructureReport rep;
  rep.checks.push_back(symmetric_check("M", sys.M, true, 0.0, kSymTol));
  rep.checks.push_back(symmetric_check("D", sys.D, false, kPsdTol, kSymTol));
  rep.checks.push_back(symmetric_check("K", sys.K, true, 0.0, kSymTol));
  InvariantCheck g = skew_check("G", sys.G, kSymTol);
  if (!sys.has_gyro && sys.G.size() > 0 && sys.G.cwiseAbs().maxCoeff() != 0.0) g.passed = false;
  rep.checks.push_back(g);
  return rep;
}

StructureReport check_structure(const StructuredROM& rom) {
  for (const Matrix* A : {&rom.Mr, &rom.Dr, &rom.Gr, &rom.Kr, &rom.Br, &rom.basis})
    require_finite(*A, "ROM operator");
  StructureReport rep;
  rep.checks.push_back(symmetric_check("M", rom.Mr, true, 0.0, kSymTol));
  rep.checks.push_back(symmetric_check("D", rom.Dr, false, kPsdTol, kSymTol));
  rep.checks.push_back(symmetric_check("K", rom.Kr, true, 0.0, kSymTol));
  rep.checks.push_back(skew_check("G", rom.Gr, 0.0));
  InvariantCheck v;
  v.name = "basis";
  const Index r = rom.basis.cols();
  v.symmetry_defect = r > 0 ? (rom.basis.transpose() * rom.basis - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() : 0.0;
  v.passed = v.symmetry_defect <= 1e-12;
  rep.checks.push_back(v);
  return rep;
}

bool StructureReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const InvariantCheck& StructureReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorCode::InvalidArgument, "no invariant named " + name);
}

std::string StructureReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& c : checks) {
    os << c.name << ": " << (c.passed ? "pass" : "FAIL") << " defect=" << c.symmetry_defect;
    if (c.name != "G" && c.name != "basis") os << " min_eig=" << c.min_eig << " max_eig=" << c.max_eig;
    os << '\n';
  }
  return os.str();
}

}  // namespace sopinf

#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace sopinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// M xdd + (D + omega G) xd + K x = B u
struct SecondOrderSystem {
  Matrix M, D, G, K, B;
  bool has_gyro = false;

  Index n() const { return M.rows(); }
  Index m() const { return B.cols(); }
  Matrix damping_with_spin(double omega) const;
};

struct SnapshotSet {
  Vector times;
  Matrix U, X, Xd, Xdd;

  Index size() const { return times.size(); }
  Index n() const { return X.rows(); }
  Index m() const { return U.rows(); }
  double dt() const;
};

// Throws DimensionMismatch / InvalidArgument when the snapshot invariants are violated.
void validate_snapshots(const SnapshotSet& s);

struct StructuredROM {
  Matrix Mr, Dr, Gr, Kr, Br;
  Matrix basis;
  double omega_train = 0.0;
  // false for the unconstrained least-squares comparator
  bool structure_guaranteed = true;

  Index r() const { return Mr.rows(); }
  Index m() const { return Br.cols(); }
  Index n() const { return basis.rows(); }
  Matrix damping_with_spin(double omega) const;
};

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double symmetry_defect = 0.0;  // ||A - A^T||_F, or ||G + G^T||_F for the skew check
  double min_eig = 0.0;
  double max_eig = 0.0;
};

struct StructureReport {
  std::vector<InvariantCheck> checks;

  bool all_passed() const;
  const InvariantCheck& at(const std::string& name) const;
  std::string summary() const;
};

StructureReport check_structure(const SecondOrderSystem& sys);
StructureReport check_structure(const StructuredROM& rom);

Matrix compose_e(const Matrix& D, const Matrix& G, double omega);
// Symmetric and antisymmetric parts of E.
std::pair<Matrix, Matrix> split_e(const Matrix& E);

bool all_finite(const Matrix& A);
void require_finite(const Matrix& A, const std::string& what);

}  // namespace sopinf

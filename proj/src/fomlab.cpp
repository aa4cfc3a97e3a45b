#include "sopinf/fomlab.hpp"

#include "sopinf/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

namespace sopinf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// Fails when the constraints leave a rigid-body (zero-stiffness) mode.
void require_spd_stiffness(const Matrix& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(K, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-13 * hi))
    throw Error(ErrorCode::SingularAssembly, "stiffness matrix is not positive definite (min eig " + std::to_string(lo) + ")");
}

Matrix delete_rows_cols(const Matrix& A, const std::vector<Index>& keep) {
  Matrix out(keep.size(), keep.size());
  for (size_t i = 0; i < keep.size(); ++i)
    for (size_t j = 0; j < keep.size(); ++j) out(i, j) = A(keep[i], keep[j]);
  return out;
}

}  // namespace

Matrix beam_element_stiffness(double EI, double le) {
  const double L = le, L2 = le * le;
  Matrix k(4, 4);
  k << 12, 6 * L, -12, 6 * L,
       6 * L, 4 * L2, -6 * L, 2 * L2,
       -12, -6 * L, 12, -6 * L,
       6 * L, 2 * L2, -6 * L, 4 * L2;
  return (EI / (L * L2)) * k;
}

Matrix beam_element_mass(double rhoA, double le) {
  const double L = le, L2 = le * le;
  Matrix m(4, 4);
  m << 156, 22 * L, 54, -13 * L,
       22 * L, 4 * L2, 13 * L, -3 * L2,
       54, 13 * L, 156, -22 * L,
       -13 * L, -3 * L2, -22 * L, 4 * L2;
  return (rhoA * L / 420.0) * m;
}

void BeamSpec::validate() const {
  require(n_elements >= 2, "beam needs at least two elements");
  require(length > 0 && youngs_modulus > 0 && density > 0 && cross_section_area > 0 && second_moment > 0,
          "beam material and geometry constants must be positive");
  if (support == SupportKind::Overhanging) {
    require(left_support_node >= 0 && right_support_node <= n_elements && left_support_node < right_support_node,
            "overhanging supports must be distinct nodes within the beam");
  }
  require(!load_nodes.empty(), "beam needs at least one load node");
  for (int node : load_nodes) require(node >= 0 && node <= n_elements, "load node out of range");
  require(rayleigh_alpha >= 0 && rayleigh_beta >= 0, "Rayleigh coefficients must be non-negative");
}

SecondOrderSystem build_beam(const BeamSpec& spec) {
  spec.validate();
  const int nn = spec.n_elements + 1;
  const Index nd = 2 * nn;
  const double le = spec.length / spec.n_elements;
  const Matrix ke = beam_element_stiffness(spec.youngs_modulus * spec.second_moment, le);
  const Matrix me = beam_element_mass(spec.density * spec.cross_section_area, le);

  Matrix K = Matrix::Zero(nd, nd), M = Matrix::Zero(nd, nd);
  for (int e = 0; e < spec.n_elements; ++e) {
    K.block(2 * e, 2 * e, 4, 4) += ke;
    M.block(2 * e, 2 * e, 4, 4) += me;
  }
  Matrix Bfull = Matrix::Zero(nd, 1);
  for (int node : spec.load_nodes) Bfull(2 * node, 0) = 1.0;

  std::vector<bool> fixed(nd, false);
  if (spec.support == SupportKind::Cantilever) {
    fixed[0] = fixed[1] = true;
  } else {
    fixed[2 * spec.left_support_node] = true;
    fixed[2 * spec.right_support_node] = true;
  }
  std::vector<Index> keep;
  for (Index i = 0; i < nd; ++i)
    if (!fixed[i]) keep.push_back(i);

  SecondOrderSystem sys;
  sys.K = delete_rows_cols(K, keep);
  sys.M = delete_rows_cols(M, keep);
  sys.B.resize(keep.size(), 1);
  for (size_t i = 0; i < keep.size(); ++i) sys.B(i, 0) = Bfull(keep[i], 0);
  require_spd_stiffness(sys.K);
  if (spec.rayleigh_alpha == 0.0 && spec.rayleigh_beta == 0.0)
    sys.D = Matrix::Zero(sys.M.rows(), sys.M.cols());
  else
    sys.D = spec.rayleigh_alpha * sys.M + spec.rayleigh_beta * sys.K;
  sys.G = Matrix::Zero(sys.M.rows(), sys.M.cols());
  sys.has_gyro = false;
  return sys;
}

void RotorSpec::validate() const {
  require(n_nodes >= 1, "rotor needs at least one node");
  require(n_nodes == 1 || element_length > 0, "element length must be positive");
  require(node_mass > 0 && node_transverse_inertia > 0, "node mass and transverse inertia must be positive");
  require(node_polar_inertia >= 0 && shaft_bending_stiffness >= 0 && shaft_damping >= 0, "shaft constants must be non-negative");
  require(bearing_stiffness >= 0 && bearing_damping >= 0 && bearing_tilt_stiffness >= 0, "bearing constants must be non-negative");
  for (int b : bearing_nodes) require(b >= 0 && b < n_nodes, "bearing node out of range");
  require(forced_node >= 0 && forced_node < n_nodes, "forced node out of range");
  for (const auto& d : disks) {
    require(d.node >= 0 && d.node < n_nodes, "disk node out of range");
    require(d.mass >= 0 && d.transverse_inertia >= 0, "disk mass and inertia must be non-negative");
    require(d.polar_inertia > 0, "disk polar inertia must be positive");
  }
}

SecondOrderSystem build_rotor(const RotorSpec& spec) {
  spec.validate();
  const int nn = spec.n_nodes;
  const Index n = 4 * nn;
  Matrix M = Matrix::Zero(n, n), K = Matrix::Zero(n, n), D = Matrix::Zero(n, n), G = Matrix::Zero(n, n);

  std::vector<double> mass(nn, spec.node_mass), it(nn, spec.node_transverse_inertia), ip(nn, spec.node_polar_inertia);
  for (const auto& d : spec.disks) {
    mass[d.node] += d.mass;
    it[d.node] += d.transverse_inertia;
    ip[d.node] += d.polar_inertia;
  }
  for (int i = 0; i < nn; ++i) {
    const Index b = 4 * i;
    M(b, b) = M(b + 1, b + 1) = mass[i];
    M(b + 2, b + 2) = M(b + 3, b + 3) = it[i];
    G(b + 2, b + 3) = ip[i];
    G(b + 3, b + 2) = -ip[i];
  }

  Matrix Kshaft = Matrix::Zero(n, n);
  if (nn > 1) {
    const Matrix ke = beam_element_stiffness(spec.shaft_bending_stiffness, spec.element_length);
    // plane 1: (x1, th2), plane 2: (x2, th1)
    const int planes[2][2] = {{0, 3}, {1, 2}};
    for (int e = 0; e + 1 < nn; ++e) {
      for (const auto& p : planes) {
        const Index idx[4] = {4 * e + p[0], 4 * e + p[1], 4 * (e + 1) + p[0], 4 * (e + 1) + p[1]};
        for (int a = 0; a < 4; ++a)
          for (int c = 0; c < 4; ++c) Kshaft(idx[a], idx[c]) += ke(a, c);
      }
    }
  }
  K = Kshaft;
  if (spec.shaft_damping > 0) D = spec.shaft_damping * Kshaft;
  for (int bn : spec.bearing_nodes) {
    const Index b = 4 * bn;
    K(b, b) += spec.bearing_stiffness;
    K(b + 1, b + 1) += spec.bearing_stiffness;
    K(b + 2, b + 2) += spec.bearing_tilt_stiffness;
    K(b + 3, b + 3) += spec.bearing_tilt_stiffness;
    D(b, b) += spec.bearing_damping;
    D(b + 1, b + 1) += spec.bearing_damping;
  }
  require_spd_stiffness(K);

  SecondOrderSystem sys;
  sys.M = std::move(M);
  sys.D = std::move(D);
  sys.G = std::move(G);
  sys.K = std::move(K);
  sys.B = Matrix::Zero(n, 2);
  sys.B(4 * spec.forced_node, 0) = 1.0;
  sys.B(4 * spec.forced_node + 1, 1) = 1.0;
  sys.has_gyro = true;
  return sys;
}

SecondOrderSystem build_synthetic(int n, int m, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "synthetic system needs n, m >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  auto draw = [&](Index rows, Index cols, auto& dist) {
    Matrix A(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) A(i, j) = dist(rng);
    return A;
  };
  const Matrix F = draw(n, n, unit);
  const Matrix H = draw(n, n, unit);
  const Matrix C = draw(n, n, unit);
  const Matrix S = draw(n, n, unit);

  SecondOrderSystem sys;
  const Matrix I = Matrix::Identity(n, n);
  sys.M = F * F.transpose() + n * I;
  sys.K = H * H.transpose() + n * I;
  sys.D = 0.01 * (C * C.transpose());
  sys.G = S - S.transpose();
  sys.B = draw(n, m, sym);
  // Gram products from Eigen's blocked kernels are not guaranteed bitwise symmetric.
  for (Matrix* A : {&sys.M, &sys.K, &sys.D}) *A = 0.5 * (*A + A->transpose());
  sys.has_gyro = n > 1;
  return sys;
}

}  // namespace sopinf

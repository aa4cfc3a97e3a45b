#include "sopinf/timestep.hpp"

#include "sopinf/error.hpp"

#include <Eigen/LU>

#include <limits>

namespace sopinf {

void NewmarkConfig::validate(Index n) const {
  if (!(dt > 0)) throw Error(ErrorCode::InvalidArgument, "Newmark dt must be positive");
  if (!(beta > 0 && beta <= 0.5)) throw Error(ErrorCode::InvalidArgument, "Newmark beta must lie in (0, 0.5]");
  if (!(gamma >= 0 && gamma <= 1)) throw Error(ErrorCode::InvalidArgument, "Newmark gamma must lie in [0, 1]");
  if (n_steps < 0) throw Error(ErrorCode::InvalidArgument, "n_steps must be non-negative");
  if (x0.size() != 0 && x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong length");
  if (v0.size() != 0 && v0.size() != n) throw Error(ErrorCode::DimensionMismatch, "v0 has the wrong length");
}

namespace {

Eigen::PartialPivLU<Matrix> factor_or_throw(const Matrix& A, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 64 * std::numeric_limits<double>::epsilon()))
    throw Error(ErrorCode::SingularEffectiveMatrix, std::string(what) + " is singular to working precision");
  return lu;
}

}  // namespace

SnapshotSet integrate_operators(const Matrix& M, const Matrix& E, const Matrix& K, const Matrix& B, const Matrix& U,
                                const NewmarkConfig& cfg) {
  const Index n = M.rows();
  cfg.validate(n);
  if (M.cols() != n || E.rows() != n || E.cols() != n || K.rows() != n || K.cols() != n || B.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "operator shapes disagree");
  if (U.rows() != B.cols() || U.cols() != cfg.n_steps + 1)
    throw Error(ErrorCode::DimensionMismatch, "input matrix must be m x (n_steps + 1)");

  const Index N = cfg.n_steps + 1;
  const double dt = cfg.dt, beta = cfg.beta, gamma = cfg.gamma;
  SnapshotSet s;
  s.times.resize(N);
  for (Index k = 0; k < N; ++k) s.times(k) = k * dt;
  s.U = U;
  s.X.resize(n, N);
  s.Xd.resize(n, N);
  s.Xdd.resize(n, N);
  s.X.col(0) = cfg.x0.size() ? cfg.x0 : Vector::Zero(n);
  s.Xd.col(0) = cfg.v0.size() ? cfg.v0 : Vector::Zero(n);

  const Matrix BU = B * U;
  const auto mass_lu = factor_or_throw(M, "mass matrix");
  s.Xdd.col(0) = mass_lu.solve(BU.col(0) - E * s.Xd.col(0) - K * s.X.col(0));

  const auto eff_lu = factor_or_throw(M + gamma * dt * E + beta * dt * dt * K, "effective matrix");
  Vector xs(n), vs(n);
  for (Index k = 0; k + 1 < N; ++k) {
    xs.noalias() = s.X.col(k) + dt * s.Xd.col(k) + dt * dt * (0.5 - beta) * s.Xdd.col(k);
    vs.noalias() = s.Xd.col(k) + dt * (1.0 - gamma) * s.Xdd.col(k);
    s.Xdd.col(k + 1) = eff_lu.solve(BU.col(k + 1) - E * vs - K * xs);
    s.X.col(k + 1) = xs + beta * dt * dt * s.Xdd.col(k + 1);
    s.Xd.col(k + 1) = vs + gamma * dt * s.Xdd.col(k + 1);
  }
  if (!s.X.allFinite() || !s.Xd.allFinite() || !s.Xdd.allFinite())
    throw Error(ErrorCode::NonFinite, "time integration overflowed");
  return s;
}

SnapshotSet integrate(const SecondOrderSystem& sys, double omega, const Matrix& U, const NewmarkConfig& cfg) {
  if (!sys.has_gyro && omega != 0.0)
    throw Error(ErrorCode::InvalidArgument, "nonzero spin speed requested for a system without gyroscopic terms");
  return integrate_operators(sys.M, sys.damping_with_spin(omega), sys.K, sys.B, U, cfg);
}

OdeResidual ode_residuals(const Matrix& M, const Matrix& E, const Matrix& K, const Matrix& B, const SnapshotSet& s) {
  const Matrix BU = B * s.U;
  const Matrix R = M * s.Xdd + E * s.Xd + K * s.X - BU;
  return {R.colwise().norm().transpose(), BU.colwise().norm().transpose()};
}

}  // namespace sopinf

#pragma once

#include "sopinf/structures.hpp"

namespace sopinf {

struct NewmarkConfig {
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 1e-3;
  int n_steps = 0;
  Vector x0;  // empty means zero
  Vector v0;

  void validate(Index n) const;
  double duration() const { return dt * n_steps; }
};

// Integrates M a + (D + omega G) v + K x = B u on the grid t_k = k dt.
SnapshotSet integrate(const SecondOrderSystem& sys, double omega, const Matrix& U, const NewmarkConfig& cfg);

// Same scheme for arbitrary (possibly non-symmetric) E.
SnapshotSet integrate_operators(const Matrix& M, const Matrix& E, const Matrix& K, const Matrix& B, const Matrix& U,
                                const NewmarkConfig& cfg);

// Per-column ||M a + E v + K x - B u|| and ||B u||.
struct OdeResidual {
  Vector residual;
  Vector forcing;
};
OdeResidual ode_residuals(const Matrix& M, const Matrix& E, const Matrix& K, const Matrix& B, const SnapshotSet& s);

}  // namespace sopinf

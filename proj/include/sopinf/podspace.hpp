#pragma once

#include "sopinf/structures.hpp"

namespace sopinf {

struct PodBasis {
  Matrix V;                // n x r, orthonormal columns
  Vector singular_values;  // all min(n, N) values, non-increasing
  int r = 0;
};

struct Scales {
  double alpha_x = 1.0;
  double alpha_v = 1.0;
  double alpha_a = 1.0;
  double alpha_u = 1.0;
};

// Full spectrum of X plus the first r left-singular vectors, each sign-fixed so that its
// largest-magnitude entry is positive.
PodBasis pod_basis(const Matrix& X, int r);

// Smallest r whose leading singular values hold at least 1 - tau of the total energy.
int select_order_by_energy(const Vector& sigma, double tau = 1e-10);

// sigma_i / sigma_1
Vector sigma_ratios(const Vector& sigma);

SnapshotSet project(const PodBasis& basis, const SnapshotSet& snaps);

// Frobenius norms of the reduced matrices.
Scales compute_scales(const SnapshotSet& reduced);
SnapshotSet normalize(const SnapshotSet& reduced, const Scales& scales);

// ||X - V V^T X||_F^2
double reconstruction_error_sq(const Matrix& X, const Matrix& V);
// sum_{i > r} sigma_i^2
double tail_energy(const Vector& sigma, int r);

}  // namespace sopinf

#pragma once

#include "sopinf/podspace.hpp"
#include "sopinf/structures.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sopinf {

// M = Mc Mc^T, D = Dc Dc^T, G = Gc - Gc^T, K^-1 = Kc Kc^T, B = Bt
struct FactorParams {
  Matrix Mc, Dc, Gc, Kc, Bt;

  Index r() const { return Mc.rows(); }
  Index m() const { return Bt.cols(); }
  bool all_finite() const;
  // Flattened view in the fixed order Mc, Dc, Gc, Kc, Bt (column-major inside each block).
  Vector flatten() const;
  static FactorParams unflatten(const Vector& v, Index r, Index m);
};

struct TrainConfig {
  int epochs = 36000;
  double lr_low = 5e-6;
  double lr_high = 1e-3;
  int cycle_length = 2000;  // epochs per half cycle
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  double omega = 0.0;

  void validate() const;
};

struct TrainResult {
  FactorParams params;  // best-loss iterate
  FactorParams initial;
  std::vector<double> loss_history;  // loss after the update of each epoch
  std::vector<double> lr_history;
  double final_loss = 0.0;
  int best_epoch = -1;
};

FactorParams init_params(int r, int m, std::uint64_t seed);

Matrix predict(const FactorParams& p, const SnapshotSet& data, double omega);
double loss(const FactorParams& p, const SnapshotSet& data, double omega);
FactorParams loss_grad(const FactorParams& p, const SnapshotSet& data, double omega);
double loss_and_grad(const FactorParams& p, const SnapshotSet& data, double omega, FactorParams& grad);

// Triangular wave between lr_low and lr_high, half period cycle_length, starting at lr_low.
double cyclic_lr(int epoch, const TrainConfig& cfg);

// data must already be divided by scales (unit Frobenius norms).
TrainResult train(const SnapshotSet& data, const Scales& scales, const TrainConfig& cfg);

StructuredROM assemble_rom(const TrainResult& result, const Scales& scales, const PodBasis& basis, double omega_train);

// ||X_r - K^-1 (B U - M Xdd_r - (D + omega G) Xd_r)||_F^2 with the physical operators of rom.
double physical_residual_sq(const StructuredROM& rom, const SnapshotSet& reduced, double omega);

struct LsBaseline {
  StructuredROM rom;  // Mr = I, structure_guaranteed = false
  Matrix E, K, B;
  double relative_residual = 0.0;  // ||Xdd + E Xd + K X - B U||_F / ||Xdd||_F
};

// Unconstrained fit of Xdd_r = -E Xd_r - K X_r + B U. Input channels that are identically zero
// are left out of the regression and receive zero columns in B.
LsBaseline ls_opinf_baseline(const SnapshotSet& reduced, double omega, const Matrix& basis = Matrix());

}  // namespace sopinf

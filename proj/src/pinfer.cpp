#include "sopinf/pinfer.hpp"

#include "sopinf/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <array>
#include <cmath>
#include <random>

namespace sopinf {

bool FactorParams::all_finite() const {
  return Mc.allFinite() && Dc.allFinite() && Gc.allFinite() && Kc.allFinite() && Bt.allFinite();
}

Vector FactorParams::flatten() const {
  Vector v(4 * Mc.size() + Bt.size());
  Index off = 0;
  for (const Matrix* A : {&Mc, &Dc, &Gc, &Kc, &Bt}) {
    v.segment(off, A->size()) = Eigen::Map<const Vector>(A->data(), A->size());
    off += A->size();
  }
  return v;
}

FactorParams FactorParams::unflatten(const Vector& v, Index r, Index m) {
  if (v.size() != 4 * r * r + r * m) throw Error(ErrorCode::DimensionMismatch, "flat parameter vector has the wrong length");
  FactorParams p;
  Index off = 0;
  for (Matrix* A : {&p.Mc, &p.Dc, &p.Gc, &p.Kc}) {
    *A = Eigen::Map<const Matrix>(v.data() + off, r, r);
    off += r * r;
  }
  p.Bt = Eigen::Map<const Matrix>(v.data() + off, r, m);
  return p;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be at least 1");
  if (!(lr_low > 0 && lr_low <= lr_high)) throw Error(ErrorCode::InvalidArgument, "need 0 < lr_low <= lr_high");
  if (cycle_length < 1) throw Error(ErrorCode::InvalidArgument, "cycle_length must be at least 1");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1 && adam_eps > 0))
    throw Error(ErrorCode::InvalidArgument, "Adam constants out of range");
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidArgument, "omega must be finite");
}

FactorParams init_params(int r, int m, std::uint64_t seed) {
  if (r < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "init_params needs r, m >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Matrix A(r, r);
    for (Index j = 0; j < r; ++j)
      for (Index i = 0; i < r; ++i) A(i, j) = unit(rng);
    return A;
  };
  FactorParams p;
  p.Mc = draw();
  p.Dc = draw();
  p.Kc = draw();
  p.Gc = Matrix::Zero(r, r);
  p.Bt = Matrix::Ones(r, m);
  return p;
}

namespace {

void check_dims(const FactorParams& p, const SnapshotSet& d) {
  const Index r = p.r();
  for (const Matrix* A : {&p.Mc, &p.Dc, &p.Gc, &p.Kc})
    if (A->rows() != r || A->cols() != r) throw Error(ErrorCode::DimensionMismatch, "factor blocks must be r x r");
  if (p.Bt.rows() != r) throw Error(ErrorCode::DimensionMismatch, "Bt must have r rows");
  if (d.X.rows() != r || d.Xd.rows() != r || d.Xdd.rows() != r)
    throw Error(ErrorCode::DimensionMismatch, "reduced data dimension differs from r");
  if (d.U.rows() != p.Bt.cols()) throw Error(ErrorCode::DimensionMismatch, "input dimension differs from Bt");
  const Index N = d.X.cols();
  if (N == 0 || d.Xd.cols() != N || d.Xdd.cols() != N || d.U.cols() != N)
    throw Error(ErrorCode::DimensionMismatch, "snapshot column counts disagree");
}

// Quantities shared by loss and gradient.
struct Forward {
  Matrix P;  // Kc Kc^T
  Matrix A;  // Bt U - M Xdd - E Xd
  Matrix R;  // X - P A
};

void forward(const FactorParams& p, const SnapshotSet& d, double omega, Forward& f) {
  f.P.noalias() = p.Kc * p.Kc.transpose();
  Matrix E;
  E.noalias() = p.Dc * p.Dc.transpose();
  if (omega != 0.0) E += omega * (p.Gc - p.Gc.transpose());
  Matrix Mm;
  Mm.noalias() = p.Mc * p.Mc.transpose();
  f.A.noalias() = p.Bt * d.U;
  f.A.noalias() -= Mm * d.Xdd;
  f.A.noalias() -= E * d.Xd;
  f.R = d.X;
  f.R.noalias() -= f.P * f.A;
}

void gradient(const FactorParams& p, const SnapshotSet& d, double omega, const Forward& f, FactorParams& g) {
  const double c = 2.0 / static_cast<double>(d.X.cols());
  Matrix PR;
  PR.noalias() = f.P * f.R;
  g.Bt.noalias() = -c * PR * d.U.transpose();
  Matrix S;
  S.noalias() = PR * d.Xdd.transpose();
  g.Mc.noalias() = c * (S + S.transpose()) * p.Mc;
  S.noalias() = PR * d.Xd.transpose();
  g.Dc.noalias() = c * (S + S.transpose()) * p.Dc;
  g.Gc = (c * omega) * (S - S.transpose());
  S.noalias() = f.R * f.A.transpose();
  g.Kc.noalias() = -c * (S + S.transpose()) * p.Kc;
}

}  // namespace

Matrix predict(const FactorParams& p, const SnapshotSet& data, double omega) {
  check_dims(p, data);
  Forward f;
  forward(p, data, omega, f);
  return data.X - f.R;
}

double loss(const FactorParams& p, const SnapshotSet& data, double omega) {
  check_dims(p, data);
  Forward f;
  forward(p, data, omega, f);
  return f.R.squaredNorm() / static_cast<double>(data.X.cols());
}

double loss_and_grad(const FactorParams& p, const SnapshotSet& data, double omega, FactorParams& grad) {
  check_dims(p, data);
  Forward f;
  forward(p, data, omega, f);
  gradient(p, data, omega, f, grad);
  return f.R.squaredNorm() / static_cast<double>(data.X.cols());
}

FactorParams loss_grad(const FactorParams& p, const SnapshotSet& data, double omega) {
  FactorParams g;
  loss_and_grad(p, data, omega, g);
  return g;
}

double cyclic_lr(int epoch, const TrainConfig& cfg) {
  const double step = cfg.cycle_length;
  const double cycle = std::floor(1.0 + epoch / (2.0 * step));
  const double x = std::abs(epoch / step - 2.0 * cycle + 1.0);
  return cfg.lr_low + (cfg.lr_high - cfg.lr_low) * std::max(0.0, 1.0 - x);
}

TrainResult train(const SnapshotSet& data, const Scales& scales, const TrainConfig& cfg) {
  cfg.validate();
  const double tol = 1e-10;
  if (std::abs(data.X.norm() - 1.0) > tol || std::abs(data.Xd.norm() - 1.0) > tol ||
      std::abs(data.Xdd.norm() - 1.0) > tol || std::abs(data.U.norm() - 1.0) > tol)
    throw Error(ErrorCode::InvalidArgument, "training data must be normalized to unit Frobenius norms");
  for (double a : {scales.alpha_x, scales.alpha_v, scales.alpha_a, scales.alpha_u})
    if (!(a > 0)) throw Error(ErrorCode::InvalidArgument, "scales must be positive");

  const int r = static_cast<int>(data.X.rows());
  const int m = static_cast<int>(data.U.rows());
  TrainResult res;
  res.initial = init_params(r, m, cfg.seed);
  FactorParams p = res.initial;
  check_dims(p, data);

  std::array<Matrix*, 5> theta = {&p.Mc, &p.Dc, &p.Gc, &p.Kc, &p.Bt};
  FactorParams g = p;
  std::array<Matrix*, 5> grad = {&g.Mc, &g.Dc, &g.Gc, &g.Kc, &g.Bt};
  std::array<Matrix, 5> m1, m2;
  for (size_t b = 0; b < theta.size(); ++b) {
    m1[b] = Matrix::Zero(theta[b]->rows(), theta[b]->cols());
    m2[b] = m1[b];
  }

  res.loss_history.reserve(cfg.epochs);
  res.lr_history.reserve(cfg.epochs);
  const double invN = 1.0 / static_cast<double>(data.X.cols());
  Forward f;
  forward(p, data, cfg.omega, f);
  double best = std::numeric_limits<double>::infinity();
  double b1t = 1.0, b2t = 1.0;

  for (int e = 0; e < cfg.epochs; ++e) {
    gradient(p, data, cfg.omega, f, g);
    const double lr = cyclic_lr(e, cfg);
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    const double c1 = 1.0 / (1.0 - b1t), c2 = 1.0 / (1.0 - b2t);
    for (size_t b = 0; b < theta.size(); ++b) {
      m1[b] = cfg.adam_beta1 * m1[b] + (1.0 - cfg.adam_beta1) * *grad[b];
      m2[b] = cfg.adam_beta2 * m2[b] + (1.0 - cfg.adam_beta2) * grad[b]->cwiseAbs2();
      theta[b]->array() -= lr * (m1[b].array() * c1) / ((m2[b].array() * c2).sqrt() + cfg.adam_eps);
    }
    forward(p, data, cfg.omega, f);
    const double L = f.R.squaredNorm() * invN;
    if (!std::isfinite(L)) throw Error(ErrorCode::NonFinite, "loss became non-finite at epoch " + std::to_string(e));
    res.loss_history.push_back(L);
    res.lr_history.push_back(lr);
    if (L < best) {
      best = L;
      res.params = p;
      res.best_epoch = e;
    }
  }
  res.final_loss = best;
  return res;
}

StructuredROM assemble_rom(const TrainResult& result, const Scales& s, const PodBasis& basis, double omega_train) {
  const FactorParams& p = result.params;
  if (!p.all_finite()) throw Error(ErrorCode::NonFinite, "trained factors are not finite");
  const Index r = p.r();
  if (basis.V.cols() != r) throw Error(ErrorCode::DimensionMismatch, "basis order differs from the trained ROM");

  auto gram = [](const Matrix& F) -> Matrix {
    Matrix A = F * F.transpose();
    return 0.5 * (A + A.transpose());
  };
  const Matrix Kinv = gram(p.Kc);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Kinv, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0) || hi / lo > 1e12)
    throw Error(ErrorCode::IllConditionedStiffness,
                "inverse stiffness factor product has condition number " + std::to_string(hi / lo));

  StructuredROM rom;
  rom.Mr = gram(p.Mc) / s.alpha_a;
  rom.Dr = gram(p.Dc) / s.alpha_v;
  rom.Gr = (p.Gc - p.Gc.transpose()) / s.alpha_v;
  rom.Br = p.Bt / s.alpha_u;
  Matrix Kr = (s.alpha_x * Kinv).llt().solve(Matrix::Identity(r, r));
  rom.Kr = 0.5 * (Kr + Kr.transpose());
  rom.basis = basis.V;
  rom.omega_train = omega_train;
  rom.structure_guaranteed = true;
  return rom;
}

double physical_residual_sq(const StructuredROM& rom, const SnapshotSet& d, double omega) {
  const Matrix rhs = rom.Br * d.U - rom.Mr * d.Xdd - rom.damping_with_spin(omega) * d.Xd;
  const Matrix Xp = rom.Kr.ldlt().solve(rhs);
  return (d.X - Xp).squaredNorm();
}

LsBaseline ls_opinf_baseline(const SnapshotSet& d, double omega, const Matrix& basis) {
  const Index r = d.X.rows(), m = d.U.rows(), N = d.X.cols();
  std::vector<Index> active;
  for (Index i = 0; i < m; ++i)
    if (d.U.row(i).cwiseAbs().maxCoeff() > 0.0) active.push_back(i);
  const Index ma = static_cast<Index>(active.size());
  const Index p = 2 * r + ma;

  Matrix Z(p, N);
  Z.topRows(r) = d.Xd;
  Z.middleRows(r, r) = d.X;
  for (Index i = 0; i < ma; ++i) Z.row(2 * r + i) = d.U.row(active[i]);
  // Row scaling keeps the rank decision independent of physical units.
  Vector w(p);
  for (Index i = 0; i < p; ++i) {
    w(i) = Z.row(i).norm();
    if (w(i) == 0.0) throw Error(ErrorCode::RankDeficientRegressor, "a regressor row is identically zero");
    Z.row(i) /= w(i);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(Z.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() < p) throw Error(ErrorCode::RankDeficientRegressor, "regressor has rank " + std::to_string(qr.rank()) + " < " + std::to_string(p));
  Matrix W = qr.solve(d.Xdd.transpose()).transpose();  // r x p, Xdd ~ W Z
  for (Index i = 0; i < p; ++i) W.col(i) /= w(i);

  LsBaseline out;
  out.E = -W.leftCols(r);
  out.K = -W.middleCols(r, r);
  out.B = Matrix::Zero(r, m);
  for (Index i = 0; i < ma; ++i) out.B.col(active[i]) = W.col(2 * r + i);
  const Matrix res = d.Xdd + out.E * d.Xd + out.K * d.X - out.B * d.U;
  out.relative_residual = res.norm() / d.Xdd.norm();

  StructuredROM& rom = out.rom;
  rom.Mr = Matrix::Identity(r, r);
  rom.Kr = out.K;
  rom.Br = out.B;
  if (omega != 0.0) {
    auto [sym, skew] = split_e(out.E);
    rom.Dr = sym;
    rom.Gr = skew / omega;
  } else {
    rom.Dr = out.E;
    rom.Gr = Matrix::Zero(r, r);
  }
  rom.basis = basis.size() ? basis : Matrix::Identity(r, r);
  rom.omega_train = omega;
  rom.structure_guaranteed = false;
  return out;
}

}  // namespace sopinf

#include "sopinf/podspace.hpp"

#include "sopinf/error.hpp"

#include <Eigen/SVD>

namespace sopinf {

PodBasis pod_basis(const Matrix& X, int r) {
  const Index k = std::min(X.rows(), X.cols());
  if (r < 1 || r > k) throw Error(ErrorCode::InvalidArgument, "POD order must lie in [1, min(n, N)]");
  require_finite(X, "snapshot matrix");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU);
  PodBasis pb;
  pb.singular_values = svd.singularValues();
  const double s1 = pb.singular_values(0);
  if (!(s1 > 0)) throw Error(ErrorCode::ZeroSnapshot, "snapshot matrix is identically zero");
  if (pb.singular_values(r - 1) / s1 < 1e-14)
    throw Error(ErrorCode::RankDeficient, "requested order " + std::to_string(r) + " exceeds the numerical rank");
  pb.V = svd.matrixU().leftCols(r);
  for (Index j = 0; j < r; ++j) {
    Index imax = 0;
    pb.V.col(j).cwiseAbs().maxCoeff(&imax);
    if (pb.V(imax, j) < 0) pb.V.col(j) *= -1.0;
  }
  pb.r = r;
  return pb;
}

int select_order_by_energy(const Vector& sigma, double tau) {
  const Vector e = sigma.array().square();
  const double total = e.sum();
  if (!(total > 0)) throw Error(ErrorCode::ZeroSnapshot, "empty spectrum");
  double acc = 0.0;
  for (Index i = 0; i < e.size(); ++i) {
    acc += e(i);
    if (acc / total >= 1.0 - tau) return static_cast<int>(i + 1);
  }
  return static_cast<int>(e.size());
}

Vector sigma_ratios(const Vector& sigma) {
  if (sigma.size() == 0 || !(sigma(0) > 0)) throw Error(ErrorCode::ZeroSnapshot, "empty spectrum");
  return sigma / sigma(0);
}

SnapshotSet project(const PodBasis& basis, const SnapshotSet& snaps) {
  if (basis.V.rows() != snaps.n()) throw Error(ErrorCode::DimensionMismatch, "basis and snapshots disagree on n");
  SnapshotSet red;
  red.times = snaps.times;
  red.U = snaps.U;
  const Matrix Vt = basis.V.transpose();
  red.X = Vt * snaps.X;
  red.Xd = Vt * snaps.Xd;
  red.Xdd = Vt * snaps.Xdd;
  return red;
}

Scales compute_scales(const SnapshotSet& reduced) {
  Scales s{reduced.X.norm(), reduced.Xd.norm(), reduced.Xdd.norm(), reduced.U.norm()};
  for (double a : {s.alpha_x, s.alpha_v, s.alpha_a, s.alpha_u}) {
    if (!std::isfinite(a)) throw Error(ErrorCode::NonFinite, "snapshot norm is not finite");
    if (a == 0.0) throw Error(ErrorCode::ZeroSnapshot, "a snapshot matrix is identically zero");
  }
  return s;
}

SnapshotSet normalize(const SnapshotSet& reduced, const Scales& scales) {
  SnapshotSet out;
  out.times = reduced.times;
  out.X = reduced.X / scales.alpha_x;
  out.Xd = reduced.Xd / scales.alpha_v;
  out.Xdd = reduced.Xdd / scales.alpha_a;
  out.U = reduced.U / scales.alpha_u;
  return out;
}

double reconstruction_error_sq(const Matrix& X, const Matrix& V) {
  return (X - V * (V.transpose() * X)).squaredNorm();
}

double tail_energy(const Vector& sigma, int r) {
  double acc = 0.0;
  for (Index i = r; i < sigma.size(); ++i) acc += sigma(i) * sigma(i);
  return acc;
}

}  // namespace sopinf

#include "sopinf/evalkit.hpp"

#include "sopinf/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

namespace sopinf {

Matrix simulate_rom(const StructuredROM& rom, double omega, const Matrix& U, const NewmarkConfig& cfg) {
  if (rom.structure_guaranteed && !check_structure(rom).all_passed())
    throw Error(ErrorCode::InvalidArgument, "ROM violates its structural invariants");
  NewmarkConfig c = cfg;
  c.x0.resize(0);
  c.v0.resize(0);
  const SnapshotSet red = integrate_operators(rom.Mr, rom.damping_with_spin(omega), rom.Kr, rom.Br, U, c);
  return rom.basis * red.X;
}

Vector relative_error(const Matrix& X, const Matrix& Xhat) {
  if (X.rows() != Xhat.rows() || X.cols() != Xhat.cols())
    throw Error(ErrorCode::DimensionMismatch, "trajectories have different shapes");
  const double ref = X.colwise().norm().maxCoeff();
  if (!(ref > 0)) throw Error(ErrorCode::ZeroReference, "reference trajectory is identically zero");
  return (X - Xhat).colwise().norm().transpose() / ref;
}

double max_relative_error(const Matrix& X, const Matrix& Xhat) { return relative_error(X, Xhat).maxCoeff(); }

namespace {

// Runs task(i) for i in [0, count) on up to jobs threads; results land in caller-owned slots.
void run_indexed(size_t count, int jobs, const std::function<void(size_t)>& task) {
  const size_t workers = std::min<size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SweepResult sorted(const std::vector<double>& axis, std::vector<double> ep, std::vector<double> eb,
                   std::pair<double, double> band) {
  std::vector<size_t> order(axis.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return axis[a] < axis[b]; });
  SweepResult out;
  out.train_band = band;
  for (size_t i : order) {
    out.axis_values.push_back(axis[i]);
    out.max_rel_error_p.push_back(ep[i]);
    if (!eb.empty()) out.max_rel_error_baseline.push_back(eb[i]);
  }
  return out;
}

}  // namespace

SweepResult frequency_sweep(const SecondOrderSystem& fom, double omega, const StructuredROM& rom,
                            const StructuredROM* baseline, const std::vector<double>& freqs, double amplitude,
                            const std::vector<double>& channel_phases, const NewmarkConfig& cfg,
                            std::pair<double, double> train_band, int jobs) {
  if (freqs.empty()) throw Error(ErrorCode::InvalidArgument, "frequency sweep needs at least one frequency");
  if (static_cast<Index>(channel_phases.size()) != fom.m())
    throw Error(ErrorCode::DimensionMismatch, "one phase per input channel is required");
  const Vector times = uniform_grid(cfg.dt, cfg.n_steps);
  std::vector<double> ep(freqs.size()), eb(baseline ? freqs.size() : 0);
  run_indexed(freqs.size(), jobs, [&](size_t i) {
    std::vector<ChannelSpec> ch;
    for (double phi : channel_phases) ch.push_back(HarmonicSpec{amplitude, phi, freqs[i]});
    const Matrix U = sample_input(ch, times);
    const Matrix X = integrate(fom, omega, U, cfg).X;
    ep[i] = max_relative_error(X, simulate_rom(rom, omega, U, cfg));
    if (baseline) eb[i] = max_relative_error(X, simulate_rom(*baseline, omega, U, cfg));
  });
  return sorted(freqs, std::move(ep), std::move(eb), train_band);
}

SweepResult speed_sweep(const SecondOrderSystem& fom, const StructuredROM& rom, const StructuredROM* baseline,
                        const std::vector<double>& omegas, const Matrix& U, const NewmarkConfig& cfg,
                        std::pair<double, double> train_band, int jobs) {
  if (omegas.empty()) throw Error(ErrorCode::InvalidArgument, "speed sweep needs at least one speed");
  std::vector<double> ep(omegas.size()), eb(baseline ? omegas.size() : 0);
  run_indexed(omegas.size(), jobs, [&](size_t i) {
    const Matrix X = integrate(fom, omegas[i], U, cfg).X;
    ep[i] = max_relative_error(X, simulate_rom(rom, omegas[i], U, cfg));
    if (baseline) eb[i] = max_relative_error(X, simulate_rom(*baseline, omegas[i], U, cfg));
  });
  return sorted(omegas, std::move(ep), std::move(eb), train_band);
}

StructuredROM intrusive_galerkin(const SecondOrderSystem& sys, const PodBasis& basis) {
  const Matrix& V = basis.V;
  if (V.rows() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "basis and system disagree on n");
  auto congruence_sym = [&](const Matrix& A) -> Matrix {
    Matrix C = V.transpose() * A * V;
    return 0.5 * (C + C.transpose());
  };
  StructuredROM rom;
  rom.Mr = congruence_sym(sys.M);
  rom.Dr = congruence_sym(sys.D);
  rom.Kr = congruence_sym(sys.K);
  Matrix Gc = V.transpose() * sys.G * V;
  rom.Gr = 0.5 * (Gc - Gc.transpose());
  rom.Br = V.transpose() * sys.B;
  rom.basis = V;
  rom.structure_guaranteed = true;
  return rom;
}

}  // namespace sopinf

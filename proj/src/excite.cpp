#include "sopinf/excite.hpp"

#include "sopinf/error.hpp"

#include <cmath>
#include <numbers>

namespace sopinf {

double chirp_phase(const ChirpSpec& s, double t) {
  if (!(s.sweep_time > 0)) throw Error(ErrorCode::InvalidArgument, "chirp sweep_time must be positive");
  return s.phi0 + 2.0 * std::numbers::pi * (s.f0 * t + (s.f1 - s.f0) * t * t / (2.0 * s.sweep_time));
}

double chirp_frequency(const ChirpSpec& s, double t) { return s.f0 + (s.f1 - s.f0) * t / s.sweep_time; }

double chirp_value(const ChirpSpec& s, double t) { return s.amplitude * std::cos(chirp_phase(s, t)); }

double harmonic_value(const HarmonicSpec& s, double t) {
  if (s.frequency < 0) throw Error(ErrorCode::InvalidArgument, "harmonic frequency must be non-negative");
  return s.amplitude * std::cos(s.phi0 + 2.0 * std::numbers::pi * s.frequency * t);
}

double channel_value(const ChannelSpec& spec, double t) {
  return std::visit(
      [t](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ChirpSpec>)
          return chirp_value(s, t);
        else
          return harmonic_value(s, t);
      },
      spec);
}

Matrix sample_input(const std::vector<ChannelSpec>& channels, const Vector& times) {
  if (channels.empty()) throw Error(ErrorCode::InvalidArgument, "at least one input channel is required");
  Matrix U(static_cast<Index>(channels.size()), times.size());
  for (Index i = 0; i < U.rows(); ++i)
    for (Index k = 0; k < times.size(); ++k) U(i, k) = channel_value(channels[i], times(k));
  return U;
}

Vector uniform_grid(double dt, int n_steps) {
  if (!(dt > 0) || n_steps < 0) throw Error(ErrorCode::InvalidArgument, "grid needs dt > 0 and n_steps >= 0");
  Vector t(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) t(k) = k * dt;
  return t;
}

}  // namespace sopinf

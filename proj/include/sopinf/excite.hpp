#pragma once

#include "sopinf/structures.hpp"

#include <variant>
#include <vector>

namespace sopinf {

// u(t) = A cos(phi0 + 2 pi (f0 t + (f1 - f0) t^2 / (2 sweep_time)))
struct ChirpSpec {
  double amplitude = 1.0;
  double phi0 = 0.0;
  double f0 = 0.0;
  double f1 = 0.0;
  double sweep_time = 1.0;
};

struct HarmonicSpec {
  double amplitude = 1.0;
  double phi0 = 0.0;
  double frequency = 0.0;
};

using ChannelSpec = std::variant<ChirpSpec, HarmonicSpec>;

double chirp_phase(const ChirpSpec& spec, double t);
double chirp_frequency(const ChirpSpec& spec, double t);
double chirp_value(const ChirpSpec& spec, double t);
double harmonic_value(const HarmonicSpec& spec, double t);
double channel_value(const ChannelSpec& spec, double t);

// Row i holds channel i sampled at every time.
Matrix sample_input(const std::vector<ChannelSpec>& channels, const Vector& times);

// t_k = k dt, k = 0..n_steps
Vector uniform_grid(double dt, int n_steps);

}  // namespace sopinf

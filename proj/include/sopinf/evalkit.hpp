#pragma once

#include "sopinf/excite.hpp"
#include "sopinf/podspace.hpp"
#include "sopinf/structures.hpp"
#include "sopinf/timestep.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sopinf {

struct SweepResult {
  std::vector<double> axis_values;
  std::vector<double> max_rel_error_p;
  std::vector<double> max_rel_error_baseline;  // empty when no baseline was given
  std::pair<double, double> train_band{0.0, 0.0};
};

// Reduced trajectory from zero initial state, lifted with the ROM basis.
Matrix simulate_rom(const StructuredROM& rom, double omega, const Matrix& U, const NewmarkConfig& cfg);

// eps_i = ||x_i - xhat_i|| / max_k ||x_k||
Vector relative_error(const Matrix& X, const Matrix& Xhat);
double max_relative_error(const Matrix& X, const Matrix& Xhat);

// One harmonic per input channel, channel i lagging by channel_phases[i]. The FOM is
// integrated with omega, the ROMs too. Results are sorted by frequency.
SweepResult frequency_sweep(const SecondOrderSystem& fom, double omega, const StructuredROM& rom,
                            const StructuredROM* baseline, const std::vector<double>& freqs, double amplitude,
                            const std::vector<double>& channel_phases, const NewmarkConfig& cfg,
                            std::pair<double, double> train_band, int jobs = 1);

// Fixed input U, spin speed varied. Results are sorted by speed.
SweepResult speed_sweep(const SecondOrderSystem& fom, const StructuredROM& rom, const StructuredROM* baseline,
                        const std::vector<double>& omegas, const Matrix& U, const NewmarkConfig& cfg,
                        std::pair<double, double> train_band, int jobs = 1);

StructuredROM intrusive_galerkin(const SecondOrderSystem& sys, const PodBasis& basis);

}  // namespace sopinf

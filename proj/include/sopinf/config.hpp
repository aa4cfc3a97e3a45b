#pragma once

#include "sopinf/excite.hpp"
#include "sopinf/fomlab.hpp"
#include "sopinf/pinfer.hpp"
#include "sopinf/timestep.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sopinf {

enum class ModelKind { Beam, Rotor, Synthetic };

struct SyntheticSpec {
  int n = 2;
  int m = 1;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  std::string name;
  ModelKind kind = ModelKind::Beam;
  BeamSpec beam;
  RotorSpec rotor;
  SyntheticSpec synthetic;

  std::vector<ChannelSpec> channels;

  double dt = 1e-3;
  double duration = 1.0;
  int n_steps = 0;
  double newmark_beta = 0.25;
  double newmark_gamma = 0.5;
  double omega = 0.0;  // spin speed of the training data

  std::optional<int> r;  // unset: chosen by energy_tol
  double energy_tol = 1e-10;

  TrainConfig training;

  std::vector<double> sweep_frequencies;
  double sweep_amplitude = 1.0;
  std::vector<double> sweep_phases;  // rad, one per input channel
  double sweep_dt = 0.0;
  double sweep_duration = 0.0;
  std::vector<double> sweep_speeds;

  std::optional<std::filesystem::path> output_dir;

  std::string source_text;

  NewmarkConfig newmark() const;
  NewmarkConfig sweep_newmark() const;
  Index state_dimension() const;
  Index input_dimension() const;
  std::pair<double, double> chirp_band() const;
};

// Section/key INI text. Unknown keys and bad values raise ConfigError naming "section.key".
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

SecondOrderSystem build_model(const PipelineConfig& cfg);

// 64-bit FNV-1a, hex encoded.
std::string config_hash(const std::string& text);

}  // namespace sopinf

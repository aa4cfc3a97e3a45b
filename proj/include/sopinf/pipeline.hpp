#pragma once

#include "sopinf/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace sopinf {

struct RunOptions {
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;  // overrides training.seed
  int jobs = 1;
  std::ostream* log = nullptr;
};

enum class Stage { Run, Generate, Train, Validate, Sweep, SvdReport };

Stage parse_stage(const std::string& name);

// --out, then [output] dir, then $SOPINF_OUT, then ./sopinf_out
std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& flag, const PipelineConfig& cfg);

void stage_generate(const PipelineConfig& cfg, const RunOptions& opt);
void stage_svd_report(const PipelineConfig& cfg, const RunOptions& opt);
void stage_train(const PipelineConfig& cfg, const RunOptions& opt);
void stage_validate(const PipelineConfig& cfg, const RunOptions& opt);
void stage_sweep(const PipelineConfig& cfg, const RunOptions& opt);
void run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opt);

// 0 ok, 2 config error, 3 numeric failure, 4 missing artifact, 1 anything else
int exit_code_for(const std::exception& e);

}  // namespace sopinf

#include "sopinf/error.hpp"
#include "sopinf/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving operator inference for second-order systems"};
  app.require_subcommand(1, 1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 1;
  for (const char* name : {"run", "generate", "train", "validate", "sweep", "svd-report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment config file")->required();
    sub->add_option("--seed", seed, "training seed, overrides the config");
    sub->add_option("--out", out, "artifact directory");
    sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const sopinf::Stage stage = sopinf::parse_stage(app.get_subcommands().front()->get_name());
    const sopinf::PipelineConfig cfg = sopinf::load_config(config);
    sopinf::RunOptions opt;
    std::optional<std::filesystem::path> flag;
    if (out) flag = std::filesystem::path(*out);
    opt.out_dir = sopinf::resolve_out_dir(flag, cfg);
    opt.seed = seed;
    opt.jobs = jobs;
    opt.log = &std::cerr;
    sopinf::run_stage(stage, cfg, opt);
    std::cout << opt.out_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sopinf: " << e.what() << '\n';
    return sopinf::exit_code_for(e);
  }
}

#include "sopinf/config.hpp"
#include "sopinf/error.hpp"
#include "sopinf/matrix_io.hpp"
#include "sopinf/pipeline.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace sopinf;
namespace fs = std::filesystem;

namespace {

// A twelve-DOF cantilever that runs every stage in well under a second.
const char* kSmallBeam = R"(
[model]
name = small
kind = beam

[beam]
n_elements = 6
length = 2.0
youngs_modulus = 2.1e11
density = 7850
area = 5e-4
second_moment = 4.1667e-9
rayleigh_alpha = 0.5
rayleigh_beta = 1e-4
load_nodes = 6

[excitation]
channels = 1

[channel0]
type = chirp
amplitude = 10
phi0_deg = 90
f0 = 1
f1 = 3

[integration]
dt = 0.01
duration = 1.0

[reduction]
r = 3

[training]
epochs = 300
seed = 4

[validation]
frequencies = 2 1
amplitude = 10
phases_deg = 0
dt = 0.01
duration = 2
)";

std::string with(const std::string& base, const std::string& find, const std::string& repl) {
  std::string s = base;
  const auto pos = s.find(find);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, find.size(), repl);
  return s;
}

RunOptions opts(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  return o;
}

std::string manifest_value(const fs::path& file, const std::string& key) {
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOPINF_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("configuration errors name the offending field") {
  try {
    parse_config(with(kSmallBeam, "r = 3", "r = 40"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "reduction.r");
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  try {
    parse_config(with(kSmallBeam, "seed = 4", "seed = 4\nlearning_rate = 3"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "training.learning_rate");
  }
  CHECK_THROWS_AS(parse_config(with(kSmallBeam, "duration = 1.0", "duration = 1.005")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(kSmallBeam, "kind = beam", "kind = plate")), ConfigError);
}

TEST_CASE("shipped presets parse") {
  for (const char* name : {"cantilever.cfg", "rotor.cfg", "overhanging.cfg"}) {
    const PipelineConfig cfg = load_config(fs::path(SOPINF_CONFIG_DIR) / name);
    CHECK(cfg.r.has_value());
    CHECK(*cfg.r <= cfg.state_dimension());
    CHECK(build_model(cfg).n() == cfg.state_dimension());
  }
  const PipelineConfig beam = load_config(fs::path(SOPINF_CONFIG_DIR) / "cantilever.cfg");
  CHECK(beam.state_dimension() == 120);
  CHECK(beam.training.epochs == 36000);
}

TEST_CASE("config hash is 64-bit FNV-1a") {
  CHECK(config_hash("") == "cbf29ce484222325");
  CHECK(config_hash("a") == "af63dc4c8601ec8c");
  CHECK(config_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("output directory precedence") {
  PipelineConfig cfg = parse_config(kSmallBeam);
  ::setenv("SOPINF_OUT", "/tmp/from_env", 1);
  CHECK(resolve_out_dir(std::nullopt, cfg) == fs::path("/tmp/from_env"));
  cfg.output_dir = fs::path("/tmp/from_cfg");
  CHECK(resolve_out_dir(std::nullopt, cfg) == fs::path("/tmp/from_cfg"));
  CHECK(resolve_out_dir(fs::path("/tmp/from_flag"), cfg) == fs::path("/tmp/from_flag"));
  ::unsetenv("SOPINF_OUT");
  cfg.output_dir.reset();
  CHECK(resolve_out_dir(std::nullopt, cfg) == fs::path("sopinf_out"));
}

TEST_CASE("a full run writes every artifact") {
  testutil::TempDir tmp("full");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Run, cfg, opts(tmp.path));
  for (const char* f : {"fom/M.bin", "fom/K.bin", "snapshots/X.bin", "snapshots/Xdd.bin", "snapshots/summary.txt",
                        "svd/sigma.csv", "pod/V.bin", "train/loss_history.csv", "train/manifest.txt",
                        "rom/Mr.bin", "rom/Kr.bin", "rom/Br.bin", "validate/errors.csv",
                        "validate/trajectory.csv", "sweep/frequency.csv", "sweep/frequency_manifest.txt"})
    CHECK_MESSAGE(fs::exists(tmp.path / f), f);

  const StructuredROM rom = read_rom(tmp.path / "rom");
  CHECK(rom.r() == 3);
  CHECK(check_structure(rom).all_passed());
  CHECK(manifest_value(tmp.path / "train/manifest.txt", "seed") == "4");
  CHECK(manifest_value(tmp.path / "train/manifest.txt", "seed_source") == "config");
  CHECK(manifest_value(tmp.path / "train/manifest.txt", "config_hash") == config_hash(kSmallBeam));

  std::ifstream hist(tmp.path / "train/loss_history.csv");
  std::string line;
  int rows = -1;
  while (std::getline(hist, line)) ++rows;
  CHECK(rows == 300);

  // frequencies are written sorted
  std::ifstream sw(tmp.path / "sweep/frequency.csv");
  std::getline(sw, line);
  std::getline(sw, line);
  CHECK(line.rfind("1,", 0) == 0);
}

TEST_CASE("stage by stage equals the monolithic run") {
  testutil::TempDir a("mono"), b("staged");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Run, cfg, opts(a.path));
  for (Stage s : {Stage::Generate, Stage::SvdReport, Stage::Train, Stage::Validate, Stage::Sweep})
    run_stage(s, cfg, opts(b.path));
  for (const char* f : {"train/loss_history.csv", "rom/Mr.bin", "rom/Dr.bin", "rom/Gr.bin", "rom/Kr.bin",
                        "rom/Br.bin", "validate/errors.csv", "sweep/frequency.csv"})
    CHECK_MESSAGE(testutil::read_bytes(a.path / f) == testutil::read_bytes(b.path / f), f);
}

TEST_CASE("seed override changes the factors and is recorded") {
  testutil::TempDir a("seed_a"), b("seed_b");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Generate, cfg, opts(a.path));
  run_stage(Stage::Train, cfg, opts(a.path));
  RunOptions o = opts(b.path);
  o.seed = 11;
  run_stage(Stage::Generate, cfg, o);
  run_stage(Stage::Train, cfg, o);
  CHECK(manifest_value(b.path / "train/manifest.txt", "seed") == "11");
  CHECK(manifest_value(b.path / "train/manifest.txt", "seed_source") == "cli");
  CHECK(testutil::read_bytes(a.path / "rom/Kr.bin") != testutil::read_bytes(b.path / "rom/Kr.bin"));
}

TEST_CASE("svd report runs on generated snapshots alone") {
  testutil::TempDir tmp("svd");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Generate, cfg, opts(tmp.path));
  run_stage(Stage::SvdReport, cfg, opts(tmp.path));
  std::ifstream in(tmp.path / "svd/sigma.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,sigma_ratio");
  std::getline(in, line);
  CHECK(line == "1,1");
  CHECK_FALSE(fs::exists(tmp.path / "rom"));
}

TEST_CASE("sweep reuses the persisted ROM") {
  testutil::TempDir tmp("reuse");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Run, cfg, opts(tmp.path));
  const std::string before = testutil::read_bytes(tmp.path / "sweep/frequency.csv");
  const auto stamp = fs::last_write_time(tmp.path / "rom/Kr.bin");
  fs::remove(tmp.path / "sweep/frequency.csv");
  run_stage(Stage::Sweep, cfg, opts(tmp.path));
  CHECK(testutil::read_bytes(tmp.path / "sweep/frequency.csv") == before);
  CHECK(fs::last_write_time(tmp.path / "rom/Kr.bin") == stamp);
}

TEST_CASE("missing artifacts are reported by name") {
  testutil::TempDir tmp("missing");
  const PipelineConfig cfg = parse_config(kSmallBeam);
  run_stage(Stage::Run, cfg, opts(tmp.path));
  fs::remove(tmp.path / "rom/Kr.bin");
  try {
    run_stage(Stage::Validate, cfg, opts(tmp.path));
    FAIL("expected MissingArtifact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingArtifact);
    CHECK(std::string(e.what()).find("Kr.bin") != std::string::npos);
    CHECK(exit_code_for(e) == 4);
  }
  testutil::TempDir empty("empty");
  CHECK_THROWS_AS(run_stage(Stage::Train, cfg, opts(empty.path)), Error);
}

TEST_CASE("exit codes map error classes") {
  CHECK(exit_code_for(ConfigError("x.y", "bad")) == 2);
  CHECK(exit_code_for(Error(ErrorCode::NonFinite, "nan")) == 3);
  CHECK(exit_code_for(Error(ErrorCode::SingularEffectiveMatrix, "lu")) == 3);
  CHECK(exit_code_for(Error(ErrorCode::MissingArtifact, "gone")) == 4);
  CHECK(exit_code_for(std::runtime_error("other")) == 1);
}

TEST_CASE("command line interface") {
  testutil::TempDir tmp("cli");
  const fs::path cfg_file = tmp.path / "small.cfg";
  std::ofstream(cfg_file) << kSmallBeam;
  const fs::path bad_file = tmp.path / "bad.cfg";
  std::ofstream(bad_file) << with(kSmallBeam, "r = 3", "r = 99");
  const fs::path out = tmp.path / "out";

  CHECK(run_cli("") == 2);
  CHECK(run_cli("train") == 2);
  CHECK(run_cli("run --config " + bad_file.string() + " --out " + out.string()) == 2);
  CHECK(run_cli("validate --config " + cfg_file.string() + " --out " + out.string()) == 4);
  CHECK(run_cli("generate --config " + cfg_file.string() + " --out " + out.string()) == 0);
  CHECK(run_cli("train --config " + cfg_file.string() + " --seed 9 --out " + out.string()) == 0);
  CHECK(manifest_value(out / "train/manifest.txt", "seed") == "9");
  CHECK(run_cli("sweep --config " + cfg_file.string() + " --jobs 2 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "sweep/frequency.csv"));

  const fs::path env_out = tmp.path / "env_out";
  const std::string env_cmd = "SOPINF_OUT=" + env_out.string() + " " + std::string(SOPINF_BINARY) +
                              " generate --config " + cfg_file.string() + " >/dev/null 2>&1";
  CHECK(std::system(env_cmd.c_str()) == 0);
  CHECK(fs::exists(env_out / "snapshots/X.bin"));
}

#include "sopinf/pipeline.hpp"

#include "sopinf/error.hpp"
#include "sopinf/evalkit.hpp"
#include "sopinf/matrix_io.hpp"
#include "sopinf/podspace.hpp"

#include <Eigen/SVD>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace sopinf {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::ofstream open_text(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return os;
}

void say(const RunOptions& opt, const std::string& msg) {
  if (opt.log) *opt.log << msg << '\n';
}

std::uint64_t effective_seed(const PipelineConfig& cfg, const RunOptions& opt) {
  return opt.seed ? *opt.seed : cfg.training.seed;
}

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Beam: return "beam";
    case ModelKind::Rotor: return "rotor";
    case ModelKind::Synthetic: return "synthetic";
  }
  return "?";
}

void write_manifest(const PipelineConfig& cfg, const RunOptions& opt) {
  auto os = open_text(opt.out_dir / "manifest.txt");
  os << "name = " << cfg.name << '\n'
     << "model = " << kind_name(cfg.kind) << '\n'
     << "config_hash = " << config_hash(cfg.source_text) << '\n'
     << "seed = " << effective_seed(cfg, opt) << '\n'
     << "seed_source = " << (opt.seed ? "cli" : "config") << '\n'
     << "n = " << cfg.state_dimension() << '\n'
     << "m = " << cfg.input_dimension() << '\n';
  auto echo = open_text(opt.out_dir / "config.cfg");
  echo << cfg.source_text;
}

int observed_dof(const SecondOrderSystem& sys) {
  for (Index i = 0; i < sys.B.rows(); ++i)
    if (sys.B(i, 0) != 0.0) return static_cast<int>(i);
  return 0;
}

PodBasis basis_of(const StructuredROM& rom) {
  PodBasis pb;
  pb.V = rom.basis;
  pb.r = static_cast<int>(rom.basis.cols());
  return pb;
}

void write_sweep(const fs::path& csv, const fs::path& manifest, const SweepResult& res, const char* unit,
                 const char* axis_name, double amplitude_or_nan) {
  auto os = open_text(csv);
  os << "axis,err_pinf,err_baseline\n";
  for (size_t i = 0; i < res.axis_values.size(); ++i)
    os << fmt(res.axis_values[i]) << ',' << fmt(res.max_rel_error_p[i]) << ','
       << (res.max_rel_error_baseline.empty() ? std::string("nan") : fmt(res.max_rel_error_baseline[i])) << '\n';
  auto ms = open_text(manifest);
  ms << "axis = " << axis_name << '\n'
     << "unit = " << unit << '\n'
     << "train_band_low = " << fmt(res.train_band.first) << '\n'
     << "train_band_high = " << fmt(res.train_band.second) << '\n'
     << "baseline = intrusive_galerkin\n";
  if (!std::isnan(amplitude_or_nan)) ms << "amplitude = " << fmt(amplitude_or_nan) << '\n';
}

}  // namespace

Stage parse_stage(const std::string& name) {
  if (name == "run") return Stage::Run;
  if (name == "generate") return Stage::Generate;
  if (name == "train") return Stage::Train;
  if (name == "validate") return Stage::Validate;
  if (name == "sweep") return Stage::Sweep;
  if (name == "svd-report") return Stage::SvdReport;
  throw ConfigError("command", "unknown subcommand " + name);
}

fs::path resolve_out_dir(const std::optional<fs::path>& flag, const PipelineConfig& cfg) {
  if (flag) return *flag;
  if (cfg.output_dir) return *cfg.output_dir;
  if (const char* env = std::getenv("SOPINF_OUT"); env && *env) return fs::path(env);
  return fs::path("sopinf_out");
}

void stage_generate(const PipelineConfig& cfg, const RunOptions& opt) {
  const SecondOrderSystem sys = build_model(cfg);
  const StructureReport rep = check_structure(sys);
  if (!rep.all_passed()) throw Error(ErrorCode::SingularAssembly, "generated model violates its structure:\n" + rep.summary());
  write_system(opt.out_dir / "fom", sys);

  const NewmarkConfig nm = cfg.newmark();
  const Matrix U = sample_input(cfg.channels, uniform_grid(nm.dt, nm.n_steps));
  const SnapshotSet snaps = integrate(sys, sys.has_gyro ? cfg.omega : 0.0, U, nm);
  write_snapshots(opt.out_dir / "snapshots", snaps, true);

  const OdeResidual res = ode_residuals(sys.M, sys.damping_with_spin(sys.has_gyro ? cfg.omega : 0.0), sys.K, sys.B, snaps);
  double worst = 0.0;
  for (Index k = 0; k < res.residual.size(); ++k)
    if (res.forcing(k) > 0) worst = std::max(worst, res.residual(k) / res.forcing(k));
  auto os = open_text(opt.out_dir / "snapshots" / "summary.txt");
  os << "n = " << sys.n() << "\nm = " << sys.m() << "\nsamples = " << snaps.size() << "\ndt = " << fmt(nm.dt)
     << "\nomega = " << fmt(cfg.omega) << "\nmax_ode_residual_ratio = " << fmt(worst) << '\n';
  write_manifest(cfg, opt);
  say(opt, "generate: n=" + std::to_string(sys.n()) + " samples=" + std::to_string(snaps.size()));
}

void stage_svd_report(const PipelineConfig& cfg, const RunOptions& opt) {
  const Matrix X = read_matrix_bin(opt.out_dir / "snapshots" / "X.bin");
  Eigen::BDCSVD<Matrix> svd(X);
  const Vector sigma = svd.singularValues();
  const Vector ratio = sigma_ratios(sigma);
  auto os = open_text(opt.out_dir / "svd" / "sigma.csv");
  os << "r,sigma_ratio\n";
  for (Index i = 0; i < ratio.size(); ++i) os << (i + 1) << ',' << fmt(ratio(i)) << '\n';
  write_matrix_bin(opt.out_dir / "svd" / "sigma.bin", sigma);
  auto ss = open_text(opt.out_dir / "svd" / "summary.txt");
  ss << "energy_tol = " << fmt(cfg.energy_tol) << "\nr_energy = " << select_order_by_energy(sigma, cfg.energy_tol)
     << '\n';
  if (cfg.r) ss << "r_config = " << *cfg.r << '\n';
  write_manifest(cfg, opt);
  say(opt, "svd-report: " + std::to_string(ratio.size()) + " singular values");
}

void stage_train(const PipelineConfig& cfg, const RunOptions& opt) {
  const SnapshotSet snaps = read_snapshots(opt.out_dir / "snapshots");
  Eigen::BDCSVD<Matrix> svd(snaps.X);
  const int r = cfg.r ? *cfg.r : select_order_by_energy(svd.singularValues(), cfg.energy_tol);
  const PodBasis basis = pod_basis(snaps.X, r);
  write_matrix_bin(opt.out_dir / "pod" / "V.bin", basis.V);
  write_matrix_bin(opt.out_dir / "pod" / "sigma.bin", basis.singular_values);

  const SnapshotSet reduced = project(basis, snaps);
  const Scales scales = compute_scales(reduced);
  const SnapshotSet data = normalize(reduced, scales);
  TrainConfig tc = cfg.training;
  tc.seed = effective_seed(cfg, opt);
  tc.omega = cfg.omega;
  say(opt, "train: r=" + std::to_string(r) + " epochs=" + std::to_string(tc.epochs) + " seed=" + std::to_string(tc.seed));
  const TrainResult result = train(data, scales, tc);

  {
    auto os = open_text(opt.out_dir / "train" / "loss_history.csv");
    os << "epoch,loss,lr\n";
    for (size_t e = 0; e < result.loss_history.size(); ++e)
      os << (e + 1) << ',' << fmt(result.loss_history[e]) << ',' << fmt(result.lr_history[e]) << '\n';
  }
  const fs::path fdir = opt.out_dir / "train" / "factors";
  write_matrix_bin(fdir / "Mc.bin", result.params.Mc);
  write_matrix_bin(fdir / "Dc.bin", result.params.Dc);
  write_matrix_bin(fdir / "Gc.bin", result.params.Gc);
  write_matrix_bin(fdir / "Kc.bin", result.params.Kc);
  write_matrix_bin(fdir / "Bt.bin", result.params.Bt);

  const StructuredROM rom = assemble_rom(result, scales, basis, cfg.omega);
  const StructureReport rep = check_structure(rom);
  if (!rep.all_passed()) throw Error(ErrorCode::NonFinite, "assembled ROM violates its structure:\n" + rep.summary());
  write_rom(opt.out_dir / "rom", rom);

  const double phys = physical_residual_sq(rom, reduced, cfg.omega);
  const double expect = scales.alpha_x * scales.alpha_x * static_cast<double>(snaps.size()) * result.final_loss;
  auto os = open_text(opt.out_dir / "train" / "manifest.txt");
  os << "config_hash = " << config_hash(cfg.source_text) << '\n'
     << "seed = " << tc.seed << '\n'
     << "seed_source = " << (opt.seed ? "cli" : "config") << '\n'
     << "r = " << r << '\n'
     << "omega_train = " << fmt(cfg.omega) << '\n'
     << "epochs = " << tc.epochs << '\n'
     << "alpha_x = " << fmt(scales.alpha_x) << '\n'
     << "alpha_v = " << fmt(scales.alpha_v) << '\n'
     << "alpha_a = " << fmt(scales.alpha_a) << '\n'
     << "alpha_u = " << fmt(scales.alpha_u) << '\n'
     << "final_loss = " << fmt(result.final_loss) << '\n'
     << "best_epoch = " << (result.best_epoch + 1) << '\n'
     << "physical_residual_sq = " << fmt(phys) << '\n'
     << "scaled_loss_residual_sq = " << fmt(expect) << '\n'
     << "[config]\n"
     << cfg.source_text;
  write_manifest(cfg, opt);
  say(opt, "train: final_loss=" + fmt(result.final_loss) + " best_epoch=" + std::to_string(result.best_epoch + 1));
}

void stage_validate(const PipelineConfig& cfg, const RunOptions& opt) {
  const SecondOrderSystem sys = read_system(opt.out_dir / "fom");
  const SnapshotSet snaps = read_snapshots(opt.out_dir / "snapshots");
  const StructuredROM rom = read_rom(opt.out_dir / "rom");
  const NewmarkConfig nm = cfg.newmark();
  const double omega = rom.omega_train;

  const Matrix Xp = simulate_rom(rom, omega, snaps.U, nm);
  const Vector ep = relative_error(snaps.X, Xp);
  const StructuredROM gal = intrusive_galerkin(sys, basis_of(rom));
  const Matrix Xg = simulate_rom(gal, omega, snaps.U, nm);
  const Vector eg = relative_error(snaps.X, Xg);

  Vector el = Vector::Constant(ep.size(), std::nan(""));
  std::string ls_status = "ok";
  try {
    const LsBaseline ls = ls_opinf_baseline(project(basis_of(rom), snaps), omega, rom.basis);
    el = relative_error(snaps.X, simulate_rom(ls.rom, omega, snaps.U, nm));
  } catch (const Error& e) {
    ls_status = e.what();
  }

  const int dof = observed_dof(sys);
  {
    auto os = open_text(opt.out_dir / "validate" / "errors.csv");
    os << "time,err_pinf,err_galerkin,err_ls\n";
    for (Index k = 0; k < ep.size(); ++k)
      os << fmt(snaps.times(k)) << ',' << fmt(ep(k)) << ',' << fmt(eg(k)) << ',' << fmt(el(k)) << '\n';
  }
  {
    auto os = open_text(opt.out_dir / "validate" / "trajectory.csv");
    os << "time,fom,pinf,galerkin\n";
    for (Index k = 0; k < ep.size(); ++k)
      os << fmt(snaps.times(k)) << ',' << fmt(snaps.X(dof, k)) << ',' << fmt(Xp(dof, k)) << ',' << fmt(Xg(dof, k)) << '\n';
  }
  write_rom(opt.out_dir / "galerkin", gal);
  auto os = open_text(opt.out_dir / "validate" / "summary.txt");
  os << "observed_dof = " << dof << '\n'
     << "max_rel_error_pinf = " << fmt(ep.maxCoeff()) << '\n'
     << "max_rel_error_galerkin = " << fmt(eg.maxCoeff()) << '\n'
     << "max_rel_error_ls = " << fmt(el.hasNaN() ? std::nan("") : el.maxCoeff()) << '\n'
     << "ls_status = " << ls_status << '\n'
     << "gyroscopic_norm = " << fmt(rom.Gr.norm()) << '\n'
     << "[structure]\n"
     << check_structure(rom).summary();
  say(opt, "validate: max error pinf=" + fmt(ep.maxCoeff()) + " galerkin=" + fmt(eg.maxCoeff()));
}

void stage_sweep(const PipelineConfig& cfg, const RunOptions& opt) {
  const SecondOrderSystem sys = read_system(opt.out_dir / "fom");
  const StructuredROM rom = read_rom(opt.out_dir / "rom");
  const StructuredROM gal = intrusive_galerkin(sys, basis_of(rom));
  const double omega = rom.omega_train;
  if (!cfg.sweep_frequencies.empty()) {
    const SweepResult res = frequency_sweep(sys, omega, rom, &gal, cfg.sweep_frequencies, cfg.sweep_amplitude,
                                            cfg.sweep_phases, cfg.sweep_newmark(), cfg.chirp_band(), opt.jobs);
    write_sweep(opt.out_dir / "sweep" / "frequency.csv", opt.out_dir / "sweep" / "frequency_manifest.txt", res, "Hz",
                "frequency", cfg.sweep_amplitude);
    say(opt, "sweep: " + std::to_string(res.axis_values.size()) + " frequencies");
  }
  if (!cfg.sweep_speeds.empty()) {
    const NewmarkConfig nm = cfg.newmark();
    const Matrix U = sample_input(cfg.channels, uniform_grid(nm.dt, nm.n_steps));
    const SweepResult res = speed_sweep(sys, rom, &gal, cfg.sweep_speeds, U, nm, {omega, omega}, opt.jobs);
    write_sweep(opt.out_dir / "sweep" / "speed.csv", opt.out_dir / "sweep" / "speed_manifest.txt", res, "rad/s",
                "spin_speed", std::nan(""));
    say(opt, "sweep: " + std::to_string(res.axis_values.size()) + " speeds");
  }
}

void run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opt) {
  switch (stage) {
    case Stage::Generate: stage_generate(cfg, opt); return;
    case Stage::SvdReport: stage_svd_report(cfg, opt); return;
    case Stage::Train: stage_train(cfg, opt); return;
    case Stage::Validate: stage_validate(cfg, opt); return;
    case Stage::Sweep: stage_sweep(cfg, opt); return;
    case Stage::Run:
      stage_generate(cfg, opt);
      stage_svd_report(cfg, opt);
      stage_train(cfg, opt);
      stage_validate(cfg, opt);
      stage_sweep(cfg, opt);
      return;
  }
}

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return 1;
  switch (err->code()) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::MissingArtifact: return 4;
    case ErrorCode::NonFinite:
    case ErrorCode::SingularAssembly:
    case ErrorCode::SingularEffectiveMatrix:
    case ErrorCode::RankDeficient:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ZeroSnapshot:
    case ErrorCode::IllConditionedStiffness:
    case ErrorCode::RankDeficientRegressor:
    case ErrorCode::ZeroReference:
      return 3;
    default:
      return 1;
  }
}

}  // namespace sopinf

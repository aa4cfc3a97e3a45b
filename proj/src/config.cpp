#include "sopinf/config.hpp"

#include "sopinf/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace sopinf {

namespace pt = boost::property_tree;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has_section(const std::string& sec) const { return tree_.get_child_optional(sec).has_value(); }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) {
    known_[sec].insert(key);
    auto child = tree_.get_child_optional(sec);
    if (!child) return std::nullopt;
    auto v = child->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::string text(const std::string& sec, const std::string& key) {
    auto v = raw(sec, key);
    if (!v) throw ConfigError(sec + "." + key, "missing required key");
    return *v;
  }

  std::string text_or(const std::string& sec, const std::string& key, const std::string& def) {
    auto v = raw(sec, key);
    return v ? *v : def;
  }

  template <class T>
  T number(const std::string& sec, const std::string& key) {
    return parse<T>(sec + "." + key, text(sec, key));
  }

  template <class T>
  T number_or(const std::string& sec, const std::string& key, T def) {
    auto v = raw(sec, key);
    return v ? parse<T>(sec + "." + key, *v) : def;
  }

  template <class T>
  std::vector<T> list_or(const std::string& sec, const std::string& key, std::vector<T> def) {
    auto v = raw(sec, key);
    if (!v) return def;
    std::vector<T> out;
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) {
      if (!tok.empty() && tok.back() == ',') tok.pop_back();
      if (!tok.empty()) out.push_back(parse<T>(sec + "." + key, tok));
    }
    return out;
  }

  // Every key in the file must have been asked for by the parser.
  void reject_unknown() const {
    for (const auto& [sec, child] : tree_) {
      auto it = known_.find(sec);
      if (it == known_.end()) throw ConfigError(sec, "unknown section");
      for (const auto& [key, _] : child)
        if (!it->second.count(key)) throw ConfigError(sec + "." + key, "unknown key");
    }
  }

  void mark_section(const std::string& sec) { known_[sec]; }

  template <class T>
  static T parse(const std::string& field, const std::string& s) {
    T v{};
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw ConfigError(field, "cannot parse '" + s + "'");
    if constexpr (std::is_floating_point_v<T>)
      if (!std::isfinite(v)) throw ConfigError(field, "value must be finite");
    return v;
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, std::set<std::string>> known_;
};

template <class F>
void rethrow_as_config(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

void parse_beam(Reader& rd, BeamSpec& b) {
  const std::string s = "beam";
  b.n_elements = rd.number_or(s, "n_elements", b.n_elements);
  b.length = rd.number_or(s, "length", b.length);
  b.youngs_modulus = rd.number_or(s, "youngs_modulus", b.youngs_modulus);
  b.density = rd.number_or(s, "density", b.density);
  b.cross_section_area = rd.number_or(s, "area", b.cross_section_area);
  b.second_moment = rd.number_or(s, "second_moment", b.second_moment);
  const std::string support = rd.text_or(s, "support", "cantilever");
  if (support == "cantilever") {
    b.support = SupportKind::Cantilever;
  } else if (support == "overhanging") {
    b.support = SupportKind::Overhanging;
    auto nodes = rd.list_or<int>(s, "supports", {});
    if (nodes.size() != 2) throw ConfigError("beam.supports", "overhanging beam needs exactly two support nodes");
    b.left_support_node = nodes[0];
    b.right_support_node = nodes[1];
  } else {
    throw ConfigError("beam.support", "expected cantilever or overhanging");
  }
  rd.raw(s, "supports");
  b.rayleigh_alpha = rd.number_or(s, "rayleigh_alpha", b.rayleigh_alpha);
  b.rayleigh_beta = rd.number_or(s, "rayleigh_beta", b.rayleigh_beta);
  b.load_nodes = rd.list_or<int>(s, "load_nodes", {b.n_elements - 2, b.n_elements - 1, b.n_elements});
  rethrow_as_config("beam", [&] { b.validate(); });
}

void parse_rotor(Reader& rd, RotorSpec& r) {
  const std::string s = "rotor";
  r.n_nodes = rd.number_or(s, "n_nodes", r.n_nodes);
  r.element_length = rd.number_or(s, "element_length", r.element_length);
  r.node_mass = rd.number_or(s, "node_mass", r.node_mass);
  r.node_transverse_inertia = rd.number_or(s, "node_transverse_inertia", r.node_transverse_inertia);
  r.node_polar_inertia = rd.number_or(s, "node_polar_inertia", r.node_polar_inertia);
  r.shaft_bending_stiffness = rd.number_or(s, "shaft_bending_stiffness", r.shaft_bending_stiffness);
  r.shaft_damping = rd.number_or(s, "shaft_damping", r.shaft_damping);
  r.bearing_nodes = rd.list_or<int>(s, "bearing_nodes", r.bearing_nodes);
  r.bearing_stiffness = rd.number_or(s, "bearing_stiffness", r.bearing_stiffness);
  r.bearing_damping = rd.number_or(s, "bearing_damping", r.bearing_damping);
  r.bearing_tilt_stiffness = rd.number_or(s, "bearing_tilt_stiffness", r.bearing_tilt_stiffness);
  r.forced_node = rd.number_or(s, "forced_node", r.forced_node);

  std::vector<int> def_nodes;
  for (const auto& d : r.disks) def_nodes.push_back(d.node);
  const auto nodes = rd.list_or<int>(s, "disk_nodes", def_nodes);
  auto per_disk = [&](const std::string& key, double def) {
    auto v = rd.list_or<double>(s, key, {def});
    if (v.size() == 1) v.assign(nodes.size(), v[0]);
    if (v.size() != nodes.size()) throw ConfigError(s + "." + key, "needs one value or one per disk node");
    return v;
  };
  const auto mass = per_disk("disk_mass", r.disks.empty() ? 0.0 : r.disks[0].mass);
  const auto it = per_disk("disk_transverse_inertia", r.disks.empty() ? 0.0 : r.disks[0].transverse_inertia);
  const auto ip = per_disk("disk_polar_inertia", r.disks.empty() ? 0.0 : r.disks[0].polar_inertia);
  r.disks.clear();
  for (size_t i = 0; i < nodes.size(); ++i) r.disks.push_back({nodes[i], mass[i], it[i], ip[i]});
  rethrow_as_config("rotor", [&] { r.validate(); });
}

ChannelSpec parse_channel(Reader& rd, int idx, double duration) {
  const std::string s = "channel" + std::to_string(idx);
  if (!rd.has_section(s)) throw ConfigError(s, "missing section for declared input channel");
  const std::string type = rd.text(s, "type");
  const double amp = rd.number<double>(s, "amplitude");
  const double phi0 = rd.number_or<double>(s, "phi0_deg", 0.0) * kDeg;
  if (type == "chirp") {
    ChirpSpec c{amp, phi0, rd.number<double>(s, "f0"), rd.number<double>(s, "f1"),
                rd.number_or<double>(s, "sweep_time", duration)};
    if (!(c.sweep_time > 0)) throw ConfigError(s + ".sweep_time", "must be positive");
    rd.raw(s, "frequency");
    return c;
  }
  if (type == "harmonic") {
    HarmonicSpec h{amp, phi0, rd.number<double>(s, "frequency")};
    if (h.frequency < 0) throw ConfigError(s + ".frequency", "must be non-negative");
    for (const char* k : {"f0", "f1", "sweep_time"}) rd.raw(s, k);
    return h;
  }
  throw ConfigError(s + ".type", "expected chirp or harmonic");
}

int steps_for(const std::string& field, double dt, double duration) {
  if (!(dt > 0)) throw ConfigError(field + ".dt", "must be positive");
  if (!(duration > 0)) throw ConfigError(field + ".duration", "must be positive");
  const double steps = std::round(duration / dt);
  if (std::abs(steps * dt - duration) > 1e-9 * duration)
    throw ConfigError(field + ".duration", "must be an integer multiple of dt");
  return static_cast<int>(steps);
}

}  // namespace

NewmarkConfig PipelineConfig::newmark() const {
  NewmarkConfig c;
  c.beta = newmark_beta;
  c.gamma = newmark_gamma;
  c.dt = dt;
  c.n_steps = n_steps;
  return c;
}

NewmarkConfig PipelineConfig::sweep_newmark() const {
  NewmarkConfig c = newmark();
  c.dt = sweep_dt;
  c.n_steps = static_cast<int>(std::round(sweep_duration / sweep_dt));
  return c;
}

Index PipelineConfig::state_dimension() const {
  switch (kind) {
    case ModelKind::Beam: return 2 * (beam.n_elements + 1) - 2;
    case ModelKind::Rotor: return 4 * rotor.n_nodes;
    case ModelKind::Synthetic: return synthetic.n;
  }
  return 0;
}

Index PipelineConfig::input_dimension() const {
  switch (kind) {
    case ModelKind::Beam: return 1;
    case ModelKind::Rotor: return 2;
    case ModelKind::Synthetic: return synthetic.m;
  }
  return 0;
}

std::pair<double, double> PipelineConfig::chirp_band() const {
  for (const auto& ch : channels)
    if (const auto* c = std::get_if<ChirpSpec>(&ch)) return {std::min(c->f0, c->f1), std::max(c->f0, c->f1)};
  const auto& h = std::get<HarmonicSpec>(channels.front());
  return {h.frequency, h.frequency};
}

PipelineConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  Reader rd(tree);
  PipelineConfig cfg;
  cfg.source_text = text;

  cfg.name = rd.text_or("model", "name", "experiment");
  const std::string kind = rd.text("model", "kind");
  for (const char* sec : {"beam", "rotor", "synthetic"}) rd.mark_section(sec);
  if (kind == "beam") {
    cfg.kind = ModelKind::Beam;
    parse_beam(rd, cfg.beam);
  } else if (kind == "rotor") {
    cfg.kind = ModelKind::Rotor;
    parse_rotor(rd, cfg.rotor);
  } else if (kind == "synthetic") {
    cfg.kind = ModelKind::Synthetic;
    cfg.synthetic.n = rd.number<int>("synthetic", "n");
    cfg.synthetic.m = rd.number_or<int>("synthetic", "m", 1);
    cfg.synthetic.seed = rd.number_or<std::uint64_t>("synthetic", "seed", 0);
    if (cfg.synthetic.n < 1) throw ConfigError("synthetic.n", "must be at least 1");
    if (cfg.synthetic.m < 1) throw ConfigError("synthetic.m", "must be at least 1");
  } else {
    throw ConfigError("model.kind", "expected beam, rotor or synthetic");
  }

  cfg.dt = rd.number<double>("integration", "dt");
  cfg.duration = rd.number<double>("integration", "duration");
  cfg.n_steps = steps_for("integration", cfg.dt, cfg.duration);
  cfg.newmark_beta = rd.number_or("integration", "beta", 0.25);
  cfg.newmark_gamma = rd.number_or("integration", "gamma", 0.5);
  cfg.omega = rd.number_or("integration", "omega", 0.0);
  rethrow_as_config("integration", [&] { cfg.newmark().validate(0); });
  if (cfg.kind == ModelKind::Beam && cfg.omega != 0.0)
    throw ConfigError("integration.omega", "beam models have no gyroscopic terms");

  const int nch = rd.number<int>("excitation", "channels");
  if (nch != cfg.input_dimension())
    throw ConfigError("excitation.channels", "model expects " + std::to_string(cfg.input_dimension()) + " input channel(s)");
  for (int i = 0; i < nch; ++i) cfg.channels.push_back(parse_channel(rd, i, cfg.duration));

  const Index n = cfg.state_dimension();
  if (auto r = rd.raw("reduction", "r")) {
    const int rv = Reader::parse<int>("reduction.r", *r);
    if (rv < 1) throw ConfigError("reduction.r", "must be at least 1");
    if (rv > n) throw ConfigError("reduction.r", "exceeds the state dimension n = " + std::to_string(n));
    if (rv > cfg.n_steps + 1) throw ConfigError("reduction.r", "exceeds the number of snapshots");
    cfg.r = rv;
  }
  cfg.energy_tol = rd.number_or("reduction", "energy_tol", cfg.energy_tol);
  if (!(cfg.energy_tol > 0 && cfg.energy_tol < 1)) throw ConfigError("reduction.energy_tol", "must lie in (0, 1)");

  TrainConfig& t = cfg.training;
  t.epochs = rd.number_or("training", "epochs", t.epochs);
  t.lr_low = rd.number_or("training", "lr_low", t.lr_low);
  t.lr_high = rd.number_or("training", "lr_high", t.lr_high);
  t.cycle_length = rd.number_or("training", "cycle_length", t.cycle_length);
  t.adam_beta1 = rd.number_or("training", "adam_beta1", t.adam_beta1);
  t.adam_beta2 = rd.number_or("training", "adam_beta2", t.adam_beta2);
  t.adam_eps = rd.number_or("training", "adam_eps", t.adam_eps);
  t.seed = rd.number_or<std::uint64_t>("training", "seed", t.seed);
  t.omega = cfg.omega;
  rethrow_as_config("training", [&] { t.validate(); });

  cfg.sweep_frequencies = rd.list_or<double>("validation", "frequencies", {});
  cfg.sweep_amplitude = rd.number_or("validation", "amplitude", 1.0);
  auto phases = rd.list_or<double>("validation", "phases_deg", std::vector<double>(nch, 0.0));
  if (static_cast<int>(phases.size()) != nch) throw ConfigError("validation.phases_deg", "needs one phase per input channel");
  for (double p : phases) cfg.sweep_phases.push_back(p * kDeg);
  cfg.sweep_dt = rd.number_or("validation", "dt", cfg.dt);
  cfg.sweep_duration = rd.number_or("validation", "duration", cfg.duration);
  steps_for("validation", cfg.sweep_dt, cfg.sweep_duration);
  cfg.sweep_speeds = rd.list_or<double>("validation", "speeds", {});
  if (!cfg.sweep_speeds.empty() && cfg.kind == ModelKind::Beam)
    throw ConfigError("validation.speeds", "speed sweeps need a gyroscopic model");
  for (double f : cfg.sweep_frequencies)
    if (f < 0) throw ConfigError("validation.frequencies", "frequencies must be non-negative");

  if (auto dir = rd.raw("output", "dir")) cfg.output_dir = std::filesystem::path(*dir);
  rd.reject_unknown();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

SecondOrderSystem build_model(const PipelineConfig& cfg) {
  switch (cfg.kind) {
    case ModelKind::Beam: return build_beam(cfg.beam);
    case ModelKind::Rotor: return build_rotor(cfg.rotor);
    case ModelKind::Synthetic: return build_synthetic(cfg.synthetic.n, cfg.synthetic.m, cfg.synthetic.seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sopinf

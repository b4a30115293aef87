#include "mclink/config.hpp"

#include <fstream>
#include <optional>
#include <set>

namespace mclink {

using nlohmann::json;

namespace {

std::string fmt_default(const json& v) { return v.dump(); }

/// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& doc, const std::string& name, std::vector<std::string>& notices)
      : name_(name), notices_(notices) {
    if (!doc.contains(name)) return;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ConfigError("section '" + name + "' must be an object");
    obj_ = &s;
  }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) {
      notices_.push_back(name_ + "." + key + " not set, using " + fmt_default(json(fallback)));
      return fallback;
    }
    try {
      return obj_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": expected " + json(fallback).type_name() + ", got " +
                        obj_->at(key).dump());
    }
  }

  template <class T>
  std::optional<T> get_optional(const std::string& key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key) || obj_->at(key).is_null()) return std::nullopt;
    try {
      return obj_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": unexpected value " + obj_->at(key).dump());
    }
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  std::vector<std::string>& notices_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

std::string ternary_name(Ternary v) { return std::string(1, to_char(v)); }

FlipFlopTiming read_ff(const json& doc, const std::string& section, const FlipFlopTiming& d,
                       std::vector<std::string>& notices) {
  Section s(doc, section, notices);
  FlipFlopTiming t;
  t.setup = from_ps(s.get("setup_ps", to_ps(d.setup)));
  t.hold = from_ps(s.get("hold_ps", to_ps(d.hold)));
  t.clk_to_q = from_ps(s.get("clk_to_q_ps", to_ps(d.clk_to_q)));
  s.finish();
  return t;
}

}  // namespace

LoadedConfig default_config() {
  LoadedConfig c;
  c.name = "default";
  auto& p = c.sim.params;
  p.band = RateBand::from_ghz(2.0, 2.1, 2.2, 2.3);
  p.t_osc = from_ps(200.0);
  p.tau_s = from_ps(100.0);
  p.tau_r = from_ps(100.0);
  p.tau_max = from_ps(50.0);
  p.delta = 0.1;
  p.n = 2;
  c.sim.cycles = 1'000'000;
  for (int k = -9; k <= 9; ++k) c.sweep.offsets_ps.push_back(25.0 * k);
  return c;
}

LoadedConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  LoadedConfig c = default_config();
  const LoadedConfig d = default_config();
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> top = {"name", "link", "sim", "sweep", "ffs", "ffa"};
    if (!top.count(key)) throw ConfigError("unknown top-level key '" + key + "'");
  }
  c.name = doc.value("name", std::string("unnamed"));

  {
    Section s(doc, "link", c.notices);
    auto& p = c.sim.params;
    const auto& b = d.sim.params.band;
    const double s_minus = s.get("s_minus_ghz", cpps_to_ghz(b.s_minus));
    const double s_plus = s.get("s_plus_ghz", cpps_to_ghz(b.s_plus));
    const double f_minus = s.get("f_minus_ghz", cpps_to_ghz(b.f_minus));
    const double f_plus = s.get("f_plus_ghz", cpps_to_ghz(b.f_plus));
    p.band = RateBand::from_ghz(s_minus, s_plus, f_minus, f_plus);
    p.t_osc = from_ps(s.get("t_osc_ps", to_ps(d.sim.params.t_osc)));
    p.tau_s = from_ps(s.get("tau_s_ps", to_ps(d.sim.params.tau_s)));
    p.tau_r = from_ps(s.get("tau_r_ps", to_ps(d.sim.params.tau_r)));
    p.tau_max = from_ps(s.get("tau_max_ps", to_ps(d.sim.params.tau_max)));
    p.delta = s.get("delta_cycles", d.sim.params.delta);
    p.n = s.get("n_cells", d.sim.params.n);
    p.threshold = s.get_optional<double>("threshold_cycles");
    s.finish();
  }
  {
    Section s(doc, "sim", c.notices);
    auto& sim = c.sim;
    sim.cycles = s.get_optional<std::int64_t>("cycles");
    if (auto dur = s.get_optional<double>("duration_ps")) sim.duration = from_ps(*dur);
    if (!sim.cycles && !sim.duration) {
      sim.cycles = *d.sim.cycles;
      c.notices.push_back("sim.cycles not set, using " + std::to_string(*d.sim.cycles));
    }
    sim.seed = s.get("seed", d.sim.seed);
    sim.step = from_ps(s.get("step_ps", to_ps(d.sim.step)));
    sim.noise_slot = from_ps(s.get("noise_slot_ps", to_ps(d.sim.noise_slot)));
    const auto both = s.get_optional<std::string>("unlocked_policy");
    const auto ps = s.get_optional<std::string>("unlocked_policy_snd");
    const auto pr = s.get_optional<std::string>("unlocked_policy_rcv");
    try {
      const std::string fallback = both.value_or(std::string(to_string(d.sim.policy_snd)));
      if (!both && !ps && !pr) c.notices.push_back("sim.unlocked_policy not set, using \"" + fallback + "\"");
      sim.policy_snd = unlocked_policy_from_string(ps.value_or(fallback));
      sim.policy_rcv = unlocked_policy_from_string(pr.value_or(fallback));
      sim.fidelity = fidelity_from_string(s.get("fidelity", std::string(to_string(d.sim.fidelity))));
      sim.ffs_initial = ternary_from_char(s.get("ffs_initial", ternary_name(d.sim.ffs_initial)).at(0));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("sim: ") + e.what());
    }
    sim.initial_offset_ps = s.get("initial_offset_ps", d.sim.initial_offset_ps);
    sim.halt_on_violation = s.get("halt_on_violation", d.sim.halt_on_violation);
    sim.trace.stride = s.get("trace_stride", d.sim.trace.stride);
    sim.max_stored_violations = s.get("max_stored_violations", d.sim.max_stored_violations);
    s.finish();
  }
  c.sim.ffs_timing = read_ff(doc, "ffs", d.sim.ffs_timing, c.notices);
  c.sim.ffa_timing = read_ff(doc, "ffa", d.sim.ffa_timing, c.notices);
  {
    Section s(doc, "sweep", c.notices);
    c.sweep.offsets_ps = s.get("offsets_ps", d.sweep.offsets_ps);
    c.sweep.cycles = s.get("cycles", d.sweep.cycles);
    c.sweep.options.band = s.get("band_cycles", d.sweep.options.band);
    c.sweep.options.hold_cycles = s.get("hold_cycles", d.sweep.options.hold_cycles);
    s.finish();
  }
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.sweep.options.band <= 0.0) throw ConfigError("sweep.band_cycles must be positive");
  if (c.sweep.options.hold_cycles <= 0 || c.sweep.cycles <= 0) throw ConfigError("sweep cycle counts must be positive");
  return c;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const LoadedConfig& c) {
  const auto& p = c.sim.params;
  json link = {
      {"s_minus_ghz", cpps_to_ghz(p.band.s_minus)},
      {"s_plus_ghz", cpps_to_ghz(p.band.s_plus)},
      {"f_minus_ghz", cpps_to_ghz(p.band.f_minus)},
      {"f_plus_ghz", cpps_to_ghz(p.band.f_plus)},
      {"t_osc_ps", to_ps(p.t_osc)},
      {"tau_s_ps", to_ps(p.tau_s)},
      {"tau_r_ps", to_ps(p.tau_r)},
      {"tau_max_ps", to_ps(p.tau_max)},
      {"delta_cycles", p.delta},
      {"n_cells", p.n},
  };
  if (p.threshold) link["threshold_cycles"] = *p.threshold;
  const auto& s = c.sim;
  json sim = {
      {"seed", s.seed},
      {"step_ps", to_ps(s.step)},
      {"noise_slot_ps", to_ps(s.noise_slot)},
      {"unlocked_policy_snd", std::string(to_string(s.policy_snd))},
      {"unlocked_policy_rcv", std::string(to_string(s.policy_rcv))},
      {"initial_offset_ps", s.initial_offset_ps},
      {"fidelity", std::string(to_string(s.fidelity))},
      {"ffs_initial", ternary_name(s.ffs_initial)},
      {"halt_on_violation", s.halt_on_violation},
      {"trace_stride", s.trace.stride},
      {"max_stored_violations", s.max_stored_violations},
  };
  if (s.cycles) sim["cycles"] = *s.cycles;
  if (s.duration) sim["duration_ps"] = to_ps(*s.duration);
  auto ff = [](const FlipFlopTiming& t) {
    return json{{"setup_ps", to_ps(t.setup)}, {"hold_ps", to_ps(t.hold)}, {"clk_to_q_ps", to_ps(t.clk_to_q)}};
  };
  return json{
      {"name", c.name},
      {"link", link},
      {"sim", sim},
      {"ffs", ff(s.ffs_timing)},
      {"ffa", ff(s.ffa_timing)},
      {"sweep",
       {{"offsets_ps", c.sweep.offsets_ps},
        {"cycles", c.sweep.cycles},
        {"band_cycles", c.sweep.options.band},
        {"hold_cycles", c.sweep.options.hold_cycles}}},
  };
}

}  // namespace mclink

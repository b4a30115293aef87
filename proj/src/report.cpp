#include "mclink/report.hpp"

#include <cstdio>
#include <ostream>

namespace mclink {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

KeyValues solve_report(const SimConfig& cfg) {
  const LinkParams& p = cfg.params;
  const DerivedBounds b = derive_bounds(p);
  const LinkParams eff = effective_params(p, cfg.ffs_timing);
  const DerivedBounds be = derive_bounds(eff);
  const DerivedTiming dt = derive_timing(p, cfg.ffs_timing);
  KeyValues kv = {
      {"n_cells", std::to_string(p.n)},
      {"t_ctr_ps", num(b.t_ctr_ps)},
      {"delta_inner", num(b.delta_inner)},
      {"delta", std::to_string(b.delta_cap)},
      {"n_min", std::to_string(b.n_min)},
      {"threshold_lo", num(b.t_range.lo)},
      {"threshold_hi", num(b.t_range.hi)},
      {"feasible", b.feasible ? "true" : "false"},
      {"violated_side", std::string(to_string(b.violated))},
      {"latency_ns", num(b.latency_ns)},
      {"throughput_pkt_per_ns", num(b.throughput_pkt_per_ns)},
  };
  const double slow = cpps_to_ghz(p.band.s_minus);
  const double fast = cpps_to_ghz(p.band.f_plus);
  kv.emplace_back("max_frequency_error_pct", fast > slow ? num(100.0 * max_frequency_error(slow, fast)) : "nan");
  kv.emplace_back("clocked_th_threshold", num(dt.threshold));
  kv.emplace_back("clocked_th_sample_offset", num(dt.sample_offset));
  kv.emplace_back("sim_tau_s_eff_ps", num(to_ps(eff.tau_s)));
  kv.emplace_back("sim_delta_inner", num(be.delta_inner));
  kv.emplace_back("sim_delta", std::to_string(be.delta_cap));
  kv.emplace_back("sim_n_min", std::to_string(be.n_min));
  kv.emplace_back("sim_threshold_lo", num(be.t_range.lo));
  kv.emplace_back("sim_threshold_hi", num(be.t_range.hi));
  kv.emplace_back("sim_feasible", be.feasible ? "true" : "false");
  return kv;
}

void write_key_values(const KeyValues& kv, std::ostream& out) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

json run_result_json(const RunResult& r, const LoadedConfig& cfg) {
  LoadedConfig effective = cfg;
  effective.sim = r.config;
  const RunStats& s = r.stats;
  json counts = json::object();
  for (std::size_t k = 0; k < kViolationKinds; ++k) {
    counts[std::string(to_string(static_cast<ViolationKind>(k)))] = r.violation_counts[k];
  }
  json events = json::array();
  for (const ViolationEvent& v : r.violations) {
    events.push_back({
        {"kind", std::string(to_string(v.kind))},
        {"time_ps", to_ps(v.time)},
        {"seed", v.seed},
        {"step", v.step},
        {"c_s_cycles", v.c_s},
        {"c_r_cycles", v.c_r},
        {"cell", v.cell},
        {"md_snd", std::string(1, to_char(v.md.md_snd))},
        {"md_rcv", std::string(1, to_char(v.md.md_rcv))},
        {"detail", v.detail},
    });
  }
  return json{
      {"seed", r.config.seed},
      {"config", config_to_json(effective)},
      {"armed", r.armed},
      {"initial", {{"c_s_cycles", r.c_s0}, {"c_r_cycles", r.c_r0}}},
      {"steps", r.steps},
      {"stats",
       {{"cycles_completed", s.cycles_completed},
        {"elapsed_ns", s.elapsed_ns},
        {"fraction_time_md_M", s.fraction_time_md_M},
        {"max_abs_clock_diff", s.max_abs_clock_diff},
        {"measured_throughput_pkt_per_ns", s.measured_throughput},
        {"measured_latency_max_ns", s.measured_latency_max},
        {"avg_frequency_snd_ghz", s.avg_frequency_snd_ghz},
        {"avg_frequency_rcv_ghz", s.avg_frequency_rcv_ghz},
        {"fill_min", s.fill_min},
        {"fill_max", s.fill_max},
        {"fill_mean", s.fill_mean},
        {"sender_accesses", s.sender_accesses},
        {"receiver_accesses", s.receiver_accesses}}},
      {"violation_counts", counts},
      {"violations_total", r.total_violations()},
      {"violations", events},
  };
}

}  // namespace mclink

// mclink: bound solver, simulator and offset sweep for the two-clock link.
//
// Exit codes: 0 ok, 1 usage/config error, 2 infeasible (solve),
// 3 violations found (simulate, sweep), 4 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mclink/config.hpp"
#include "mclink/report.hpp"
#include "mclink/sim_engine.hpp"
#include "mclink/trace_io.hpp"

namespace {

using namespace mclink;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kViolations = 3;
constexpr int kIo = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LoadedConfig load(const std::string& path, bool quiet) {
  LoadedConfig cfg;
  if (path.empty()) {
    cfg = default_config();
    if (!quiet) std::cerr << "notice: no --config given, using built-in defaults\n";
  } else {
    cfg = load_config(path);
  }
  if (!quiet) {
    for (const auto& n : cfg.notices) std::cerr << "notice: " << n << '\n';
  }
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

struct Common {
  std::string config;
  bool quiet = false;
};

struct SimulateArgs {
  std::optional<std::int64_t> cycles;
  std::optional<double> duration_ps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fidelity;
  std::optional<std::string> policy;
  std::optional<double> step_ps;
  std::optional<double> offset_ps;
  std::int64_t trace_stride = 0;
  std::string trace_out;
  std::string vcd_out;
  std::string result_out;
};

struct SweepArgs {
  std::optional<std::string> offsets;
  std::optional<std::int64_t> cycles;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_ps;
  std::string out;
  std::string curves_out;
  unsigned threads = 0;
};

void apply_sim_overrides(SimConfig& sim, const SimulateArgs& a) {
  if (a.cycles) {
    sim.cycles = *a.cycles;
    if (!a.duration_ps) sim.duration.reset();
  }
  if (a.duration_ps) {
    sim.duration = from_ps(*a.duration_ps);
    if (!a.cycles) sim.cycles.reset();
  }
  if (a.seed) sim.seed = *a.seed;
  if (a.fidelity) sim.fidelity = fidelity_from_string(*a.fidelity);
  if (a.policy) sim.policy_snd = sim.policy_rcv = unlocked_policy_from_string(*a.policy);
  if (a.step_ps) sim.step = from_ps(*a.step_ps);
  if (a.offset_ps) sim.initial_offset_ps = *a.offset_ps;
  if (a.trace_stride > 0) sim.trace.stride = a.trace_stride;
  sim.trace.enabled = !a.trace_out.empty() || !a.vcd_out.empty();
  sim.validate();
}

int cmd_solve(const Common& c) {
  const LoadedConfig cfg = load(c.config, c.quiet);
  const KeyValues kv = solve_report(cfg.sim);
  write_key_values(kv, std::cout);
  const DerivedBounds b = derive_bounds(cfg.sim.params);
  if (!b.feasible) {
    std::cerr << "infeasible: the " << to_string(b.violated) << " side of the threshold condition fails for N="
              << cfg.sim.params.n << " (n_min=" << b.n_min << ")\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  LoadedConfig cfg = load(c.config, c.quiet);
  apply_sim_overrides(cfg.sim, a);
  const RunResult r = run(cfg.sim);

  const RunStats& s = r.stats;
  std::printf("seed=%llu fidelity=%s armed=%s\n", static_cast<unsigned long long>(r.config.seed),
              std::string(to_string(r.config.fidelity)).c_str(), r.armed ? "true" : "false");
  std::printf("cycles_completed=%lld elapsed_ns=%.3f steps=%llu\n", static_cast<long long>(s.cycles_completed),
              s.elapsed_ns, static_cast<unsigned long long>(r.steps));
  std::printf("fraction_time_md_M=%.6f max_abs_clock_diff=%.6f\n", s.fraction_time_md_M, s.max_abs_clock_diff);
  std::printf("throughput_pkt_per_ns=%.6f latency_max_ns=%.6f\n", s.measured_throughput, s.measured_latency_max);
  std::printf("avg_frequency_snd_ghz=%.6f avg_frequency_rcv_ghz=%.6f\n", s.avg_frequency_snd_ghz,
              s.avg_frequency_rcv_ghz);
  std::printf("fill_min=%.6f fill_mean=%.6f fill_max=%.6f\n", s.fill_min, s.fill_mean, s.fill_max);
  for (std::size_t k = 0; k < kViolationKinds; ++k) {
    std::printf("violations.%s=%llu\n", std::string(to_string(static_cast<ViolationKind>(k))).c_str(),
                static_cast<unsigned long long>(r.violation_counts[k]));
  }
  for (std::size_t i = 0; i < r.violations.size() && i < 5; ++i) {
    const auto& v = r.violations[i];
    std::printf("  %s at %.3f ps: %s\n", std::string(to_string(v.kind)).c_str(), to_ps(v.time), v.detail.c_str());
  }

  if (r.trace) {
    if (!a.trace_out.empty()) {
      auto out = open_out(a.trace_out);
      write_trace_csv(*r.trace, out);
      close_out(out, a.trace_out);
    }
    if (!a.vcd_out.empty()) {
      auto out = open_out(a.vcd_out);
      write_trace_vcd(*r.trace, out);
      close_out(out, a.vcd_out);
    }
  }
  if (!a.result_out.empty()) {
    auto out = open_out(a.result_out);
    out << run_result_json(r, cfg).dump(2) << '\n';
    close_out(out, a.result_out);
  }
  return r.total_violations() > 0 ? kViolations : kOk;
}

std::vector<double> parse_offsets(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : CLI::detail::split(text, ',')) {
    const std::string t = CLI::detail::trim_copy(item);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || !std::isfinite(v)) throw CLI::ValidationError("--offsets", "not a number: " + t);
    out.push_back(v);
  }
  return out;
}

int cmd_sweep(const Common& c, const SweepArgs& a) {
  LoadedConfig cfg = load(c.config, c.quiet);
  std::vector<double> offsets = a.offsets ? parse_offsets(*a.offsets) : cfg.sweep.offsets_ps;
  if (offsets.empty()) throw CLI::ValidationError("--offsets", "at least one offset is required");
  SimConfig base = cfg.sim;
  base.cycles = a.cycles.value_or(cfg.sweep.cycles);
  base.duration.reset();
  if (a.seed) base.seed = *a.seed;
  if (a.step_ps) base.step = from_ps(*a.step_ps);
  base.validate();
  SweepOptions opts = cfg.sweep.options;
  opts.keep_curves = !a.curves_out.empty();
  opts.threads = a.threads;
  const auto rows = sweep_initial_offset(base, offsets, opts);

  if (a.out.empty()) {
    write_sweep_csv(rows, std::cout);
  } else {
    auto out = open_out(a.out);
    write_sweep_csv(rows, out);
    close_out(out, a.out);
  }
  if (!a.curves_out.empty()) {
    auto out = open_out(a.curves_out);
    write_sweep_curves_csv(rows, out, 4000);
    close_out(out, a.curves_out);
  }
  std::uint64_t total = 0;
  for (const auto& r : rows) total += r.violations;
  return total > 0 ? kViolations : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metastability-containing two-clock link: bounds, simulation, offset sweep"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", common.quiet, "Suppress default-value notices");

  auto* solve = app.add_subcommand("solve", "Evaluate the closed-form bounds");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation");
  simulate->add_option("--cycles", sim.cycles, "Receiver cycles to simulate");
  simulate->add_option("--duration-ps", sim.duration_ps, "Wall-clock length to simulate");
  simulate->add_option("--seed", sim.seed, "Noise seed");
  simulate->add_option("--fidelity", sim.fidelity, "behavioral | gate-level");
  simulate->add_option("--policy", sim.policy,
                       "Unlocked rate policy: uniform_random | max_rate | min_rate | adversarial_toward_peer");
  simulate->add_option("--step-ps", sim.step_ps, "Integration step");
  simulate->add_option("--offset-ps", sim.offset_ps, "Initial sender lead");
  simulate->add_option("--trace-stride", sim.trace_stride, "Record every n-th step in the trace");
  simulate->add_option("--trace-out", sim.trace_out, "Write the trace as CSV");
  simulate->add_option("--vcd", sim.vcd_out, "Write the trace as VCD");
  simulate->add_option("--result-out", sim.result_out, "Write the run result as JSON");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep the initial pointer offset");
  sweep->add_option("--offsets", sw.offsets, "Offsets in ps, comma separated (--offsets=-100,0,100)");
  sweep->add_option("--cycles", sw.cycles, "Receiver cycles per run");
  sweep->add_option("--seed", sw.seed, "Noise seed");
  sweep->add_option("--step-ps", sw.step_ps, "Integration step");
  sweep->add_option("--out", sw.out, "Write the sweep table as CSV (default stdout)");
  sweep->add_option("--curves-out", sw.curves_out, "Write fill curves as CSV");
  sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(common);
    if (*simulate) return cmd_simulate(common, sim);
    if (*sweep) return cmd_sweep(common, sw);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "mclink/config.hpp"
#include "mclink/sim_engine.hpp"
#include "mclink/trace_io.hpp"

using namespace mclink;

namespace {

SimConfig from_file(const std::string& name, std::int64_t cycles) {
  SimConfig c = load_config(std::string(MCLINK_CONFIG_DIR) + "/" + name).sim;
  c.cycles = cycles;
  c.duration.reset();
  return c;
}

std::string trace_csv(const RunResult& r) {
  std::ostringstream out;
  write_trace_csv(*r.trace, out);
  return out.str();
}

constexpr UnlockedPolicy kPolicies[] = {UnlockedPolicy::UniformRandom, UnlockedPolicy::MaxRate,
                                        UnlockedPolicy::MinRate, UnlockedPolicy::AdversarialTowardPeer};

}  // namespace

TEST(Engine, ShortRunIsClean) {
  const RunResult r = run(from_file("ref_asic.json", 2000));
  EXPECT_TRUE(r.armed);
  EXPECT_EQ(r.total_violations(), 0u);
  EXPECT_EQ(r.stats.cycles_completed, 2000);
  EXPECT_LE(r.stats.max_abs_clock_diff, r.bounds.t_range.hi + 1.0);
  EXPECT_NEAR(r.stats.fill_mean, 1.0, 0.25);
}

TEST(Engine, ManySeedsAndPoliciesStayClean) {
  for (const char* file : {"ref_asic.json", "ref_spice.json"}) {
    for (auto policy : kPolicies) {
      for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SimConfig c = from_file(file, 600);
        c.seed = seed * 7919;
        c.policy_snd = c.policy_rcv = policy;
        const RunResult r = run(c);
        EXPECT_EQ(r.total_violations(), 0u) << file << " " << to_string(policy) << " seed " << c.seed;
        EXPECT_LE(r.stats.max_abs_clock_diff, 1.0 - 0.0023 * 140.0);
      }
    }
  }
}

TEST(Engine, MixedPoliciesStayClean) {
  SimConfig c = from_file("ref_asic.json", 1000);
  c.policy_snd = UnlockedPolicy::MaxRate;
  c.policy_rcv = UnlockedPolicy::MinRate;
  EXPECT_EQ(run(c).total_violations(), 0u);
  c.policy_snd = UnlockedPolicy::MinRate;
  c.policy_rcv = UnlockedPolicy::MaxRate;
  EXPECT_EQ(run(c).total_violations(), 0u);
}

TEST(Engine, InfeasibleAdversarialOverflows) {
  SimConfig c = from_file("adversarial_infeasible.json", 10000);
  const RunResult r = run(c);
  EXPECT_FALSE(r.armed);
  EXPECT_GT(r.violation_counts[static_cast<std::size_t>(ViolationKind::P1Underrun)] +
                r.violation_counts[static_cast<std::size_t>(ViolationKind::P2Overflow)],
            0u);
  c.halt_on_violation = true;
  const RunResult h = run(c);
  EXPECT_EQ(h.total_violations(), 1u);
  EXPECT_LT(h.stats.cycles_completed, 100);
}

TEST(Engine, SpiceBandAverageFrequency) {
  const RunResult r = run(from_file("ref_spice.json", 20000));
  EXPECT_EQ(r.total_violations(), 0u);
  EXPECT_NEAR(r.stats.avg_frequency_rcv_ghz, 2.28, 0.05);
  EXPECT_NEAR(r.stats.avg_frequency_snd_ghz, 2.28, 0.05);
  EXPECT_NEAR(r.stats.measured_throughput, r.stats.avg_frequency_rcv_ghz, 0.01);
}

TEST(Engine, GateLevelRefinesAndIsMostlyMetastable) {
  SimConfig c = from_file("ref_asic.json", 3000);
  c.fidelity = Fidelity::GateLevel;
  const RunResult r = run(c);
  EXPECT_EQ(r.total_violations(), 0u);
  EXPECT_GT(r.stats.fraction_time_md_M, 0.5);
}

TEST(Engine, Deterministic) {
  SimConfig c = from_file("ref_asic.json", 300);
  c.trace.enabled = true;
  const std::string a = trace_csv(run(c));
  const std::string b = trace_csv(run(c));
  EXPECT_EQ(a, b);
  c.seed += 1;
  EXPECT_NE(a, trace_csv(run(c)));
}

TEST(Engine, HalfStepKeepsTrajectoryAndVerdicts) {
  for (auto policy : {UnlockedPolicy::UniformRandom, UnlockedPolicy::MaxRate}) {
    SimConfig c = from_file("ref_asic.json", 1500);
    c.policy_snd = c.policy_rcv = policy;
    const RunResult full = run(c);
    c.step = from_ps(0.5);
    const RunResult half = run(c);
    EXPECT_EQ(full.total_violations(), half.total_violations());
    EXPECT_GT(half.steps, full.steps);
    // Rates only change at noise-slot boundaries and events, so c(t) agrees.
    EXPECT_NEAR(full.stats.avg_frequency_snd_ghz, half.stats.avg_frequency_snd_ghz, 1e-9);
    EXPECT_NEAR(full.stats.max_abs_clock_diff, half.stats.max_abs_clock_diff, 1e-9);
    EXPECT_EQ(full.stats.sender_accesses, half.stats.sender_accesses);
  }
}

TEST(Engine, DurationStopsTheRun) {
  SimConfig c = from_file("ref_asic.json", 1);
  c.cycles.reset();
  c.duration = from_ps(10000.0);
  const RunResult r = run(c);
  EXPECT_NEAR(r.stats.elapsed_ns, 10.0, 1e-9);
}

TEST(Engine, TraceShowsFlagPulsesAndModes) {
  SimConfig c = from_file("ref_spice.json", 20000);
  c.trace.enabled = true;
  c.trace.stride = 5;
  const RunResult r = run(c);
  ASSERT_TRUE(r.trace);
  std::set<Ternary> md;
  std::set<Ternary> f0;
  std::set<Ternary> f1;
  for (std::size_t i = 0; i < r.trace->rows(); ++i) {
    md.insert(r.trace->md[i].md_rcv);
    f0.insert(r.trace->flags[2 * i]);
    f1.insert(r.trace->flags[2 * i + 1]);
  }
  EXPECT_EQ(md.size(), 3u);
  EXPECT_EQ(f0.size(), 3u);
  EXPECT_EQ(f1.size(), 3u);
  for (std::size_t i = 0; i < r.trace->rows(); ++i) {
    EXPECT_EQ(gate_closure(gates::not_gate(), {r.trace->md[i].md_rcv}), r.trace->md[i].md_snd);
  }
}

TEST(Engine, ConfigValidation) {
  SimConfig c = from_file("ref_asic.json", 10);
  c.params.tau_max = from_ps(5.0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = from_file("ref_asic.json", 10);
  c.step = Femtos::zero();
  EXPECT_THROW(run(c), std::invalid_argument);
  c = from_file("ref_asic.json", 10);
  c.cycles.reset();
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Stabilization, SyntheticCurves) {
  std::vector<FillSample> curve;
  for (int k = 0; k <= 1000; ++k) {
    const double fill = k < 100 ? 0.01 * k : 1.0;
    curve.push_back({from_ps(k), fill});
  }
  auto s = find_stabilization(curve, from_ps(200.0), 0.25);
  EXPECT_TRUE(s.stabilized);
  EXPECT_NEAR(s.settled, 1.0, 1e-12);
  EXPECT_NEAR(to_ps(s.time), 75.0, 0.01);

  // An excursion after a full hold window only nudges the settled mean.
  curve[700].fill = 2.0;
  s = find_stabilization(curve, from_ps(200.0), 0.25);
  EXPECT_NEAR(to_ps(s.time), 100.0 * (s.settled - 0.25), 0.01);
  EXPECT_LT(to_ps(s.time), 76.0);

  // One inside it does.
  curve[200].fill = 2.0;
  s = find_stabilization(curve, from_ps(200.0), 0.25);
  EXPECT_GT(to_ps(s.time), 200.0);
  EXPECT_LT(to_ps(s.time), 202.0);

  // Never settles for long enough.
  std::vector<FillSample> wild;
  for (int k = 0; k <= 1000; ++k) wild.push_back({from_ps(k), (k / 50) % 2 ? 1.0 : -1.0});
  EXPECT_FALSE(find_stabilization(wild, from_ps(200.0), 0.25).stabilized);
}

TEST(Sweep, StructureAroundTheCollisionPoint) {
  SimConfig base = from_file("ref_asic.json", 1500);
  const std::vector<double> offsets = {-200.0, -75.0, 0.0, 30.0, 50.0, 200.0};
  const auto rows = sweep_initial_offset(base, offsets, {});
  ASSERT_EQ(rows.size(), offsets.size());
  bool ahead = false;
  bool behind = false;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.stabilized) << r.offset_ps;
    EXPECT_NEAR(std::abs(r.final_gap_cycles), 1.0, 0.25) << r.offset_ps;
    EXPECT_EQ(r.violations, 0u) << r.offset_ps;
    (r.final_gap_cycles > 0 ? ahead : behind) = true;
  }
  EXPECT_TRUE(ahead && behind);
  EXPECT_LT(rows.front().stabilization_time_ns, rows[2].stabilization_time_ns);
  EXPECT_LT(rows.back().stabilization_time_ns, rows[2].stabilization_time_ns);
}

TEST(Sweep, ThreadedMatchesSerial) {
  SimConfig base = from_file("ref_asic.json", 400);
  SweepOptions one;
  one.threads = 1;
  SweepOptions many;
  many.threads = 3;
  const std::vector<double> offsets = {-100.0, -20.0, 10.0, 90.0};
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(sweep_initial_offset(base, offsets, one), a);
  write_sweep_csv(sweep_initial_offset(base, offsets, many), b);
  EXPECT_EQ(a.str(), b.str());
}

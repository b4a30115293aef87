#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mclink/analysis.hpp"
#include "mclink/controller.hpp"
#include "mclink/flipflop.hpp"
#include "mclink/monitors.hpp"
#include "mclink/oscillator.hpp"
#include "mclink/ternary.hpp"
#include "mclink/units.hpp"

namespace mclink {

enum class Fidelity { Behavioral, GateLevel };
std::string_view to_string(Fidelity f);
Fidelity fidelity_from_string(std::string_view name);

/// How the initial offset is applied.
///  HalfFull:  c_s(0) - c_r(0) = offset * nominal rate, buffer half full.
///  Collision: p_s(0) - p_r(0) = offset * nominal rate, so offset 0 puts
///             both pointers on the same position; cell validity follows
///             which pointer reaches a cell first.
enum class Alignment { HalfFull, Collision };

struct TraceOptions {
  bool enabled = false;
  /// Record every stride-th step boundary.
  std::int64_t stride = 1;
};

struct SimConfig {
  LinkParams params{};
  /// Run length in receiver cycles; the run also stops at `duration`.
  std::optional<std::int64_t> cycles;
  std::optional<Femtos> duration;
  std::uint64_t seed = 1;
  Femtos step = from_ps(1.0);
  /// Length of one rate-noise slot. Rates only change at slot boundaries
  /// (and on lock changes), so the step can be refined independently.
  Femtos noise_slot = from_ps(1.0);
  UnlockedPolicy policy_snd = UnlockedPolicy::UniformRandom;
  UnlockedPolicy policy_rcv = UnlockedPolicy::UniformRandom;
  double initial_offset_ps = 0.0;
  Alignment alignment = Alignment::HalfFull;
  Fidelity fidelity = Fidelity::Behavioral;
  FlipFlopTiming ffa_timing{};
  FlipFlopTiming ffs_timing{};
  Ternary ffs_initial = Ternary::M;
  bool halt_on_violation = false;
  /// Violations beyond this many are counted but not kept.
  std::size_t max_stored_violations = 1000;
  TraceOptions trace{};
  /// Record (time, fill) at every step for the offset sweep.
  bool record_fill = false;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// Nominal rate used to turn a wall-clock offset into cycles: (s- + f+)/2.
double nominal_rate(const RateBand& band);

struct Trace {
  std::int64_t n = 0;
  std::vector<Femtos> time;
  std::vector<double> c_s;
  std::vector<double> c_r;
  std::vector<ControllerOutputs> md;
  /// Row-major, n flags per row.
  std::vector<Ternary> flags;

  std::size_t rows() const { return time.size(); }
};

struct FillSample {
  Femtos time;
  double fill;
};

struct RunResult {
  SimConfig config;
  DerivedBounds bounds{};
  DerivedTiming timing{};
  /// Whether the proven properties were monitored (feasible parameters and
  /// an initial offset within delta).
  bool armed = false;
  double c_s0 = 0.0;
  double c_r0 = 0.0;
  RunStats stats{};
  std::vector<ViolationEvent> violations;
  std::array<std::uint64_t, kViolationKinds> violation_counts{};
  std::uint64_t steps = 0;
  std::optional<Trace> trace;
  std::vector<FillSample> fill;

  std::uint64_t total_violations() const;
};

RunResult run(const SimConfig& config);

struct SweepOptions {
  /// Half-width of the band around the settled fill, cycles.
  double band = 0.25;
  /// Receiver cycles the gap must stay in the band for. The settled value
  /// is the mean over the second half of the run (at least this long).
  std::int64_t hold_cycles = 50;
  /// Keep the (time, fill) curve of each run.
  bool keep_curves = false;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct SweepRow {
  double offset_ps = 0.0;
  bool stabilized = false;
  double stabilization_time_ns = 0.0;
  double final_gap_cycles = 0.0;
  std::uint64_t violations = 0;
  std::vector<FillSample> curve;
};

/// Runs base once per offset (Collision alignment) and reports when the
/// pointer gap settled, where it settled and the violations after that.
std::vector<SweepRow> sweep_initial_offset(const SimConfig& base, const std::vector<double>& offsets_ps,
                                           const SweepOptions& options = {});

/// Stabilization analysis of one fill curve. Exposed for testing.
struct Stabilization {
  bool stabilized = false;
  Femtos time{};
  double settled = 0.0;
};
Stabilization find_stabilization(const std::vector<FillSample>& curve, Femtos hold_window, double band);

}  // namespace mclink

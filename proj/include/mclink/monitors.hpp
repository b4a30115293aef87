#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mclink/controller.hpp"
#include "mclink/link_buffer.hpp"
#include "mclink/units.hpp"

namespace mclink {

enum class ViolationKind : std::uint8_t { P1Underrun, P2Overflow, Lemma1Bound, Separation, L1Conformance, Internal };
inline constexpr std::size_t kViolationKinds = 6;

std::string_view to_string(ViolationKind k);

struct ViolationEvent {
  ViolationKind kind = ViolationKind::Internal;
  Femtos time{};
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  double c_s = 0.0;
  double c_r = 0.0;
  std::int64_t cell = -1;
  ControllerOutputs md{};
  std::string detail;
};

struct RunStats {
  std::int64_t cycles_completed = 0;
  double fraction_time_md_M = 0.0;
  double max_abs_clock_diff = 0.0;
  double measured_throughput = 0.0;
  double measured_latency_max = 0.0;
  double avg_frequency_snd_ghz = 0.0;
  double avg_frequency_rcv_ghz = 0.0;
  double fill_min = 0.0;
  double fill_max = 0.0;
  double fill_mean = 0.0;
  std::uint64_t receiver_accesses = 0;
  std::uint64_t sender_accesses = 0;
  double elapsed_ns = 0.0;
};

/// |c_s - c_r| <= n/2 - f+ max_tau (max_tau in ps).
bool check_lemma1(double c_s, double c_r, std::int64_t n, double f_plus, double max_tau_ps);

/// Time at which a linear segment from (t0, d0) to (t1, d1) reaches level,
/// rounded up to the next femtosecond.
Femtos interpolate_crossing(Femtos t0, double d0, Femtos t1, double d1, double level);

/// Tracks for how long c_s - c_r has stayed at or above +threshold (or at
/// or below -threshold). The difference is linear between updates, so
/// crossings are interpolated.
class L1Tracker {
 public:
  explicit L1Tracker(double threshold) : threshold_(threshold) {}

  void start(Femtos t, double diff);
  /// Returns true when a run started or ended.
  bool update(Femtos t, double diff) {
    const bool pos = pos_since_.has_value();
    const bool neg = neg_since_.has_value();
    if (diff >= threshold_) {
      if (!pos) pos_since_ = interpolate_crossing(last_t_, last_diff_, t, diff, threshold_);
    } else {
      pos_since_.reset();
    }
    if (diff <= -threshold_) {
      if (!neg) neg_since_ = interpolate_crossing(last_t_, last_diff_, t, diff, -threshold_);
    } else {
      neg_since_.reset();
    }
    last_t_ = t;
    last_diff_ = diff;
    return pos != pos_since_.has_value() || neg != neg_since_.has_value();
  }
  /// Start of the current sender-ahead / receiver-ahead run, if any.
  std::optional<Femtos> sender_ahead_since() const { return pos_since_; }
  std::optional<Femtos> receiver_ahead_since() const { return neg_since_; }
  /// Forced outputs at t given a controller delay of t_ctr.
  std::optional<ControllerOutputs> forced(Femtos t, Femtos t_ctr) const {
    if (pos_since_ && t - *pos_since_ >= t_ctr) return ControllerOutputs{Ternary::Zero, Ternary::One};
    if (neg_since_ && t - *neg_since_ >= t_ctr) return ControllerOutputs{Ternary::One, Ternary::Zero};
    return std::nullopt;
  }

 private:
  double threshold_;
  Femtos last_t_{};
  double last_diff_ = 0.0;
  std::optional<Femtos> pos_since_;
  std::optional<Femtos> neg_since_;
};

struct MonitorConfig {
  std::int64_t n = 2;
  double f_plus = 0.0;
  /// max(tau_s, tau_r) of the link itself, ps.
  double max_tau_ps = 0.0;
  /// Bound for |c_s - c_r| (n/2 - f+ max tau over the widened window).
  double lemma_bound = 0.0;
  double l1_threshold = 0.0;
  Femtos t_ctr{};
  Femtos tau_r{};
  /// Proven properties are only checked when the parameters are feasible
  /// and the initial offset respects delta.
  bool armed = true;
  std::uint64_t seed = 0;
  std::size_t max_stored = 1000;
};

/// Runtime checks and statistics for one run.
class LinkMonitor {
 public:
  explicit LinkMonitor(const MonitorConfig& cfg);

  void start(Femtos t, double c_s, double c_r, ControllerOutputs md);
  void on_access(const AccessRecord& rec, double c_s, double c_r, std::uint64_t step);
  /// Called at every step boundary after the events at t were processed.
  /// Returns true when the next L1 obligation may have moved.
  bool on_step(Femtos t, double c_s, double c_r, ControllerOutputs md, std::uint64_t step) {
    const double diff = c_s - c_r;
    const double fill = half_n_ + diff;
    const double dt = static_cast<double>((t - last_t_).count());
    if (md_.md_rcv == Ternary::M || md_.md_snd == Ternary::M) m_time_fs_ += dt;
    fill_area_ += 0.5 * (fill + last_fill_) * dt;
    diff_min_ = std::min(diff_min_, diff);
    diff_max_ = std::max(diff_max_, diff);
    const bool l1_moved = l1_.update(t, diff);
    const bool was_armed = l1_armed();
    if (was_armed && (diff < ok_lo_ || diff > ok_hi_)) check_bounds(t, c_s, c_r, step);
    md_ = md;
    if (l1_armed()) {
      const auto want = l1_.forced(t, cfg_.t_ctr);
      const bool bad = want && !(*want == md);
      if (bad && !l1_bad_) report_l1(t, c_s, c_r, step, *want);
      l1_bad_ = bad;
    }
    last_t_ = t;
    last_c_s_ = c_s;
    last_c_r_ = c_r;
    last_fill_ = fill;
    return l1_moved || was_armed != l1_armed();
  }
  void report(ViolationKind kind, Femtos t, double c_s, double c_r, std::uint64_t step, std::int64_t cell,
              std::string detail);

  /// Earliest time after now at which a new L1 obligation begins.
  std::optional<Femtos> next_obligation(Femtos now) const;
  bool l1_armed() const { return cfg_.armed && !tripped_; }

  RunStats stats(double c_s0, double c_r0) const;
  const std::vector<ViolationEvent>& events() const { return events_; }
  std::uint64_t count(ViolationKind k) const { return counts_[static_cast<std::size_t>(k)]; }
  std::uint64_t total() const;
  bool buffer_violated() const { return count(ViolationKind::P1Underrun) + count(ViolationKind::P2Overflow) > 0; }

 private:
  MonitorConfig cfg_;
  L1Tracker l1_;
  std::vector<ViolationEvent> events_;
  std::array<std::uint64_t, kViolationKinds> counts_{};
  ControllerOutputs md_{};
  Femtos t0_{};
  Femtos last_t_{};
  double last_c_s_ = 0.0;
  double last_c_r_ = 0.0;
  double last_fill_ = 0.0;
  double m_time_fs_ = 0.0;
  double fill_area_ = 0.0;
  double latency_max_ps_ = 0.0;
  std::uint64_t rcv_accesses_ = 0;
  std::uint64_t snd_accesses_ = 0;
  std::vector<Femtos> last_write_;
  bool tripped_ = false;
  bool l1_bad_ = false;
  double half_n_ = 1.0;
  double ok_lo_ = 0.0;
  double ok_hi_ = 0.0;
  double diff_min_ = 0.0;
  double diff_max_ = 0.0;

  void check_bounds(Femtos t, double c_s, double c_r, std::uint64_t step);
  void report_l1(Femtos t, double c_s, double c_r, std::uint64_t step, ControllerOutputs want);
};

}  // namespace mclink

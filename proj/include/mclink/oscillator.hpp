#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "mclink/rng.hpp"
#include "mclink/ternary.hpp"
#include "mclink/units.hpp"

namespace mclink {

/// Slow band [s_minus, s_plus] and fast band [f_minus, f_plus], in cycles/ps.
struct RateBand {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double f_minus = 0.0;
  double f_plus = 0.0;

  static RateBand from_ghz(double s_minus, double s_plus, double f_minus, double f_plus);
  /// Requires 0 < s_minus <= s_plus <= f_minus <= f_plus.
  void validate() const;
};

enum class LockStatus { LockedSlow, LockedFast, Unlocked };
enum class UnlockedPolicy { UniformRandom, MaxRate, MinRate, AdversarialTowardPeer };

std::string_view to_string(LockStatus s);
std::string_view to_string(UnlockedPolicy p);
/// Accepts "uniform_random", "max_rate", "min_rate", "adversarial_toward_peer".
UnlockedPolicy unlocked_policy_from_string(std::string_view name);

/// Mode-signal history as (value, since) segments. The first segment extends
/// to -infinity, which is how pre-start history is represented.
class ModeHistory {
 public:
  explicit ModeHistory(Ternary initial = Ternary::M);

  /// Records a new value from time t on. Times must be nondecreasing.
  void set(Femtos t, Ternary v);
  Ternary current() const { return segments_.back().value; }
  Femtos current_since() const { return segments_.back().since; }
  Ternary value_at(Femtos t) const;
  /// Start of the segment containing t.
  Femtos segment_start(Femtos t) const;
  /// Drops segments that ended before t.
  void prune_before(Femtos t);
  std::size_t segment_count() const { return segments_.size(); }

 private:
  struct Segment {
    Ternary value;
    Femtos since;
  };
  std::deque<Segment> segments_;
};

struct OscillatorState {
  double c = 0.0;
  ModeHistory mode{Ternary::M};
  Femtos t_osc{};
  RateBand band{};
  UnlockedPolicy unlocked_policy = UnlockedPolicy::UniformRandom;
  bool is_sender = false;
};

/// LOCKED_SLOW iff the mode signal was constantly 0 over [now - t_osc, now],
/// LOCKED_FAST iff constantly 1, UNLOCKED otherwise. The status evaluated at
/// `now` also holds on (now, next_lock_transition) absent new mode changes.
LockStatus lock_status(const OscillatorState& s, Femtos now);

/// The instant after `now` at which the lock status flips by itself (the
/// constancy window completing), if any.
std::optional<Femtos> next_lock_transition(const OscillatorState& s, Femtos now);

/// Rate noise: one uniform draw per fixed-length slot of simulated time.
struct RateNoise {
  NoiseStream stream{0, 0};
  Femtos slot = from_ps(1.0);

  std::uint64_t slot_index(Femtos t) const { return static_cast<std::uint64_t>(t.count() / slot.count()); }
  Femtos slot_end(Femtos t) const { return Femtos{(t.count() / slot.count() + 1) * slot.count()}; }
  double draw(Femtos t) const { return stream.uniform(slot_index(t)); }
};

/// Rate for a given status and uniform draw u in [0, 1). `peer_c` is only
/// used by the adversarial policy, which pushes |c_s - c_r| apart.
double select_rate(const OscillatorState& s, LockStatus status, double u, double peer_c);

/// c += rate * dt with the rate chosen from the status at `now`. Returns the
/// rate used (cycles/ps). Throws std::invalid_argument if dt <= 0.
double advance(OscillatorState& s, Femtos now, Femtos dt, const RateNoise& noise, double peer_c);

enum class EdgeKind { Rising, Falling };

struct ClockEdge {
  Femtos time;
  EdgeKind kind;
  /// Integer k of the crossing: rising at c = k, falling at c = k + 1/2.
  std::int64_t cycle;
  friend bool operator==(const ClockEdge&, const ClockEdge&) = default;
};

/// Rising edges at integer crossings and falling edges at half-integer
/// crossings of c in (c_before, c_after], with times linearly interpolated
/// (rounded up to the next femtosecond) inside [t_before, t_after].
std::vector<ClockEdge> edge_events(double c_before, double c_after, Femtos t_before, Femtos t_after);

/// First femtosecond at which a clock at c0 running at `rate` (cycles/ps)
/// from t0 reaches `target`. Returns t0 when already reached.
Femtos crossing_time(double c0, double rate, Femtos t0, double target);

}  // namespace mclink

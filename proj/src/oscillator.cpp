#include "mclink/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mclink {

RateBand RateBand::from_ghz(double s_minus, double s_plus, double f_minus, double f_plus) {
  return RateBand{ghz_to_cpps(s_minus), ghz_to_cpps(s_plus), ghz_to_cpps(f_minus), ghz_to_cpps(f_plus)};
}

void RateBand::validate() const {
  if (!(s_minus > 0.0 && s_minus <= s_plus && s_plus <= f_minus && f_minus <= f_plus)) {
    throw std::invalid_argument("rate band must satisfy 0 < s- <= s+ <= f- <= f+ (got " +
                                std::to_string(cpps_to_ghz(s_minus)) + ", " + std::to_string(cpps_to_ghz(s_plus)) +
                                ", " + std::to_string(cpps_to_ghz(f_minus)) + ", " +
                                std::to_string(cpps_to_ghz(f_plus)) + " GHz)");
  }
}

std::string_view to_string(LockStatus s) {
  switch (s) {
    case LockStatus::LockedSlow: return "locked_slow";
    case LockStatus::LockedFast: return "locked_fast";
    case LockStatus::Unlocked: break;
  }
  return "unlocked";
}

std::string_view to_string(UnlockedPolicy p) {
  switch (p) {
    case UnlockedPolicy::UniformRandom: return "uniform_random";
    case UnlockedPolicy::MaxRate: return "max_rate";
    case UnlockedPolicy::MinRate: return "min_rate";
    case UnlockedPolicy::AdversarialTowardPeer: break;
  }
  return "adversarial_toward_peer";
}

UnlockedPolicy unlocked_policy_from_string(std::string_view name) {
  if (name == "uniform_random") return UnlockedPolicy::UniformRandom;
  if (name == "max_rate") return UnlockedPolicy::MaxRate;
  if (name == "min_rate") return UnlockedPolicy::MinRate;
  if (name == "adversarial_toward_peer" || name == "adversarial") return UnlockedPolicy::AdversarialTowardPeer;
  throw std::invalid_argument("unknown unlocked policy '" + std::string(name) + "'");
}

ModeHistory::ModeHistory(Ternary initial) { segments_.push_back({initial, Femtos::min()}); }

void ModeHistory::set(Femtos t, Ternary v) {
  auto& last = segments_.back();
  if (t < last.since) throw std::logic_error("mode history must be written in time order");
  if (last.value == v) return;
  if (t == last.since) {
    last.value = v;
    // Merge with the predecessor if this undid the last change.
    if (segments_.size() > 1 && segments_[segments_.size() - 2].value == v) segments_.pop_back();
    return;
  }
  segments_.push_back({v, t});
}

Ternary ModeHistory::value_at(Femtos t) const {
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (it->since <= t) return it->value;
  }
  return segments_.front().value;
}

Femtos ModeHistory::segment_start(Femtos t) const {
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (it->since <= t) return it->since;
  }
  return segments_.front().since;
}

void ModeHistory::prune_before(Femtos t) {
  while (segments_.size() > 1 && segments_[1].since <= t) segments_.pop_front();
}

LockStatus lock_status(const OscillatorState& s, Femtos now) {
  const Ternary v = s.mode.value_at(now);
  if (v == Ternary::M) return LockStatus::Unlocked;
  const Femtos since = s.mode.segment_start(now);
  if (since != Femtos::min() && since > now - s.t_osc) return LockStatus::Unlocked;
  return v == Ternary::One ? LockStatus::LockedFast : LockStatus::LockedSlow;
}

std::optional<Femtos> next_lock_transition(const OscillatorState& s, Femtos now) {
  if (s.mode.current() == Ternary::M) return std::nullopt;
  const Femtos since = s.mode.current_since();
  if (since == Femtos::min()) return std::nullopt;
  const Femtos lock_at = since + s.t_osc;
  if (lock_at > now) return lock_at;
  return std::nullopt;
}

double select_rate(const OscillatorState& s, LockStatus status, double u, double peer_c) {
  const RateBand& b = s.band;
  switch (status) {
    case LockStatus::LockedSlow: return b.s_minus + u * (b.s_plus - b.s_minus);
    case LockStatus::LockedFast: return b.f_minus + u * (b.f_plus - b.f_minus);
    case LockStatus::Unlocked: break;
  }
  switch (s.unlocked_policy) {
    case UnlockedPolicy::UniformRandom: return b.s_minus + u * (b.f_plus - b.s_minus);
    case UnlockedPolicy::MaxRate: return b.f_plus;
    case UnlockedPolicy::MinRate: return b.s_minus;
    case UnlockedPolicy::AdversarialTowardPeer: break;
  }
  // Ties go to "sender ahead" so the two clocks never chase each other.
  const bool ahead = s.is_sender ? s.c >= peer_c : s.c > peer_c;
  return ahead ? b.f_plus : b.s_minus;
}

double advance(OscillatorState& s, Femtos now, Femtos dt, const RateNoise& noise, double peer_c) {
  if (dt <= Femtos::zero()) throw std::invalid_argument("advance: dt must be positive");
  const double rate = select_rate(s, lock_status(s, now), noise.draw(now), peer_c);
  s.c += rate * to_ps(dt);
  return rate;
}

std::vector<ClockEdge> edge_events(double c_before, double c_after, Femtos t_before, Femtos t_after) {
  std::vector<ClockEdge> edges;
  if (!(c_after > c_before)) return edges;
  const double span_fs = static_cast<double>((t_after - t_before).count());
  // Half-integer grid: h/2 for integer h with c_before < h/2 <= c_after.
  const auto first = static_cast<std::int64_t>(std::floor(2.0 * c_before)) + 1;
  const auto last = static_cast<std::int64_t>(std::floor(2.0 * c_after));
  for (std::int64_t h = first; h <= last; ++h) {
    const double x = 0.5 * static_cast<double>(h);
    const double frac = (x - c_before) / (c_after - c_before);
    const auto offset = static_cast<std::int64_t>(std::ceil(frac * span_fs));
    const bool rising = (h % 2) == 0;
    edges.push_back({t_before + Femtos{std::min<std::int64_t>(offset, (t_after - t_before).count())},
                     rising ? EdgeKind::Rising : EdgeKind::Falling, static_cast<std::int64_t>(std::floor(x))});
  }
  return edges;
}

Femtos crossing_time(double c0, double rate, Femtos t0, double target) {
  if (c0 >= target) return t0;
  const double fs = (target - c0) / rate * 1e3;
  return t0 + Femtos{static_cast<std::int64_t>(std::ceil(fs))};
}

}  // namespace mclink

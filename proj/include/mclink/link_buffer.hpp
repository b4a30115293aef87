#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mclink/flipflop.hpp"
#include "mclink/ternary.hpp"
#include "mclink/units.hpp"

namespace mclink {

enum class Validity : std::uint8_t { Invalid, Valid };
enum class Party : std::uint8_t { None, Sender, Receiver };

std::string_view to_string(Validity v);
std::string_view to_string(Party p);

/// Mathematical mod, result in [0, n).
constexpr std::int64_t wrap_index(std::int64_t i, std::int64_t n) {
  const std::int64_t r = i % n;
  return r < 0 ? r + n : r;
}

/// Gate-level cell: one flip-flop per clock domain, flag = XOR of outputs.
/// The sender flip-flop latches the negated receiver state, the receiver
/// flip-flop latches the sender state.
struct GateLevelCell {
  FlipFlop snd;
  FlipFlop rcv;

  static GateLevelCell initialized(Validity v, Femtos tau_s, Femtos tau_r);
  void sender_step(Femtos t);
  void receiver_step(Femtos t);
  Ternary flag(Femtos t) const;
  Femtos last_change(Femtos t) const;
};

struct Cell {
  Validity validity = Validity::Invalid;
  /// Flag value outside of an access window.
  Ternary flag = Ternary::Zero;
  Femtos flag_changed_at = Femtos::min();
  /// Access window [busy_from, busy_until); flag reads M inside it.
  Femtos busy_from = Femtos::min();
  Femtos busy_until = Femtos::min();
  std::optional<Validity> pending_validity;
  Party last_accessor = Party::None;
  Femtos last_access = Femtos::min();
};

struct AccessRecord {
  Party party = Party::None;
  std::int64_t cell = 0;
  Femtos time{};
  /// Committed validity seen by the access.
  Validity found = Validity::Invalid;
  /// P1 (receiver found INVALID) or P2 (sender found VALID).
  bool violation = false;
  /// Same party accessed again before its previous access completed.
  bool reentrant = false;
  Party previous_accessor = Party::None;
  Femtos previous_access = Femtos::min();
  Femtos completes_at{};
};

/// Ring of N cells with worst-case flag semantics: the flag is M over the
/// whole access window, then settles to the last accessor's value.
class LinkBuffer {
 public:
  /// Throws std::invalid_argument unless n is even and >= 2 and taus >= 0.
  LinkBuffer(std::int64_t n, Femtos tau_s, Femtos tau_r, bool gate_level = false);

  /// Cells [0, N/2) valid with flag 1, the rest invalid with flag 0.
  void reset_half_full();
  /// A cell starts valid iff the receiver pointer reaches it before the
  /// sender pointer. With p_s = p_r + N/2 this is the half-full reset.
  void reset_by_first_access(double p_s0, double p_r0);

  AccessRecord sender_access(std::int64_t cell, Femtos t);
  AccessRecord receiver_access(std::int64_t cell, Femtos t);
  /// Commits a completed access window. Reads are correct without it.
  void settle(std::int64_t cell, Femtos t);

  /// Flag as seen by the controller: the gate-level XOR when enabled.
  Ternary read_flag(std::int64_t cell, Femtos t) const;
  Femtos last_flag_change(std::int64_t cell, Femtos t) const;
  Ternary behavioral_flag(std::int64_t cell, Femtos t) const;
  Femtos behavioral_last_change(std::int64_t cell, Femtos t) const;
  Validity validity(std::int64_t cell, Femtos t) const;
  /// XOR output of the gate-level model; empty unless enabled.
  std::optional<Ternary> gate_flag(std::int64_t cell, Femtos t) const;

  std::int64_t size() const { return n_; }
  Femtos tau_s() const { return tau_s_; }
  Femtos tau_r() const { return tau_r_; }
  bool gate_level() const { return !gates_.empty(); }
  const Cell& cell(std::int64_t i) const { return cells_.at(static_cast<std::size_t>(checked(i))); }

 private:
  std::int64_t checked(std::int64_t i) const;
  AccessRecord access(Party who, std::int64_t cell, Femtos t);
  void reset(const std::vector<Validity>& v);

  std::int64_t n_;
  Femtos tau_s_;
  Femtos tau_r_;
  std::vector<Cell> cells_;
  std::vector<GateLevelCell> gates_;
};

}  // namespace mclink

#pragma once

#include "mclink/ternary.hpp"
#include "mclink/units.hpp"

namespace mclink {

struct FlipFlopTiming {
  Femtos setup = from_ps(30.0);
  Femtos hold = from_ps(10.0);
  Femtos clk_to_q = from_ps(20.0);
};

/// Edge-triggered flip-flop over ternary levels. `stored` only changes at
/// latch events; the visible output is M for clk_to_q after a latch that
/// changed the stored value.
struct FlipFlop {
  Ternary stored = Ternary::Zero;
  FlipFlopTiming timing{};
  Ternary previous = Ternary::Zero;
  Femtos latched_at = Femtos::min();
  /// Last output change before the most recent latch.
  Femtos prior_change = Femtos::min();

  static FlipFlop initialized(Ternary v, FlipFlopTiming timing = {});

  Ternary output(Femtos t) const;
  /// Time of the most recent change of output(t'), t' <= t.
  Femtos output_last_change(Femtos t) const;
};

/// Latches d at edge_time. An M input, or a stable input whose last change
/// falls strictly inside (edge - setup, edge + hold), stores M.
FlipFlop ff_latch(FlipFlop ff, Ternary d, Femtos input_last_change, Femtos edge_time);

}  // namespace mclink

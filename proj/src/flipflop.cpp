#include "mclink/flipflop.hpp"

namespace mclink {

FlipFlop FlipFlop::initialized(Ternary v, FlipFlopTiming timing) {
  FlipFlop ff;
  ff.stored = v;
  ff.previous = v;
  ff.timing = timing;
  return ff;
}

Ternary FlipFlop::output(Femtos t) const {
  if (latched_at != Femtos::min() && t < latched_at) return previous;
  if (latched_at != Femtos::min() && previous != stored && t >= latched_at &&
      t < latched_at + timing.clk_to_q) {
    return Ternary::M;
  }
  return stored;
}

Femtos FlipFlop::output_last_change(Femtos t) const {
  if (latched_at == Femtos::min() || previous == stored || t < latched_at) return prior_change;
  if (t < latched_at + timing.clk_to_q) return latched_at;
  return timing.clk_to_q > Femtos::zero() ? latched_at + timing.clk_to_q : latched_at;
}

FlipFlop ff_latch(FlipFlop ff, Ternary d, Femtos input_last_change, Femtos edge_time) {
  const bool in_window = input_last_change > edge_time - ff.timing.setup &&
                         input_last_change < edge_time + ff.timing.hold;
  ff.prior_change = ff.output_last_change(Femtos::max());
  ff.previous = ff.stored;
  ff.stored = (d == Ternary::M || in_window) ? Ternary::M : d;
  ff.latched_at = edge_time;
  return ff;
}

}  // namespace mclink

#include <gtest/gtest.h>

#include "mclink/flipflop.hpp"

using namespace mclink;

namespace {

FlipFlop fresh(Ternary v = Ternary::Zero) { return FlipFlop::initialized(v, FlipFlopTiming{}); }

const Femtos kEdge = from_ps(1000.0);

}  // namespace

TEST(FlipFlop, StableInputOutsideWindowIsLatched) {
  const FlipFlop ff = ff_latch(fresh(), Ternary::One, kEdge - from_ps(500.0), kEdge);
  EXPECT_EQ(ff.stored, Ternary::One);
}

TEST(FlipFlop, ChangeInsideSetupStoresM) {
  const FlipFlop ff = ff_latch(fresh(), Ternary::One, kEdge - from_ps(5.0), kEdge);
  EXPECT_EQ(ff.stored, Ternary::M);
}

TEST(FlipFlop, ChangeInsideHoldStoresM) {
  const FlipFlop ff = ff_latch(fresh(), Ternary::One, kEdge + from_ps(5.0), kEdge);
  EXPECT_EQ(ff.stored, Ternary::M);
}

TEST(FlipFlop, WindowIsOpen) {
  // Exactly setup before or hold after the edge is still clean.
  EXPECT_EQ(ff_latch(fresh(), Ternary::One, kEdge - from_ps(30.0), kEdge).stored, Ternary::One);
  EXPECT_EQ(ff_latch(fresh(), Ternary::One, kEdge + from_ps(10.0), kEdge).stored, Ternary::One);
  EXPECT_EQ(ff_latch(fresh(), Ternary::One, kEdge - from_ps(30.0) + Femtos{1}, kEdge).stored, Ternary::M);
}

TEST(FlipFlop, MInputStoresMRegardlessOfTiming) {
  for (double before : {0.0, 5.0, 500.0, 1e6}) {
    EXPECT_EQ(ff_latch(fresh(), Ternary::M, kEdge - from_ps(before), kEdge).stored, Ternary::M);
  }
}

TEST(FlipFlop, OutputIsMDuringClockToQAfterAChange) {
  const FlipFlop ff = ff_latch(fresh(Ternary::Zero), Ternary::One, Femtos::min(), kEdge);
  EXPECT_EQ(ff.output(kEdge - Femtos{1}), Ternary::Zero);
  EXPECT_EQ(ff.output(kEdge), Ternary::M);
  EXPECT_EQ(ff.output(kEdge + from_ps(19.999)), Ternary::M);
  EXPECT_EQ(ff.output(kEdge + from_ps(20.0)), Ternary::One);
  EXPECT_EQ(ff.output_last_change(kEdge + from_ps(100.0)), kEdge + from_ps(20.0));
}

TEST(FlipFlop, RelatchingTheSameValueKeepsTheOutputStable) {
  FlipFlop ff = ff_latch(fresh(Ternary::Zero), Ternary::One, Femtos::min(), kEdge);
  const Femtos second = kEdge + from_ps(400.0);
  ff = ff_latch(ff, Ternary::One, Femtos::min(), second);
  EXPECT_EQ(ff.output(second + from_ps(1.0)), Ternary::One);
  EXPECT_EQ(ff.output_last_change(second + from_ps(1.0)), kEdge + from_ps(20.0));
}

TEST(FlipFlop, ZeroDelayPassesStraightThrough) {
  FlipFlop ff = FlipFlop::initialized(Ternary::Zero, FlipFlopTiming{Femtos::zero(), Femtos::zero(), Femtos::zero()});
  ff = ff_latch(ff, Ternary::One, kEdge, kEdge);
  EXPECT_EQ(ff.stored, Ternary::One);
  EXPECT_EQ(ff.output(kEdge), Ternary::One);
}

#include <gtest/gtest.h>

#include "mclink/controller.hpp"

using namespace mclink;

namespace {

const Femtos kTau = from_ps(100.0);

ClockedThConfig cfg(bool gate_level = false) {
  ClockedThConfig c;
  c.n = 2;
  c.tau_max = from_ps(50.0);
  c.gate_level = gate_level;
  return c;
}

// Runs one full sample cycle at e: sample, resolve at e + hold, publish.
ControllerOutputs sample(ClockedTh& ctl, const LinkBuffer& buf, Femtos e) {
  ctl.on_sample(buf, e);
  ctl.resolve(buf);
  ctl.publish();
  return ctl.outputs();
}

}  // namespace

TEST(ContTh, ReferenceOutputs) {
  const auto fast_rcv = cont_th_reference(1.3, 1.0, 0.3);
  ASSERT_TRUE(fast_rcv);
  EXPECT_EQ(fast_rcv->md_rcv, Ternary::One);
  EXPECT_EQ(fast_rcv->md_snd, Ternary::Zero);

  const auto fast_snd = cont_th_reference(1.0, 1.3, 0.3);
  ASSERT_TRUE(fast_snd);
  EXPECT_EQ(fast_snd->md_rcv, Ternary::Zero);
  EXPECT_EQ(fast_snd->md_snd, Ternary::One);

  EXPECT_FALSE(cont_th_reference(1.0, 1.1, 0.3));
  EXPECT_THROW(cont_th_reference(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(ContTh, SampledCell) {
  EXPECT_EQ(sampled_cell_index(0, 2), 1);
  EXPECT_EQ(sampled_cell_index(3, 8), 7);
  EXPECT_EQ(sampled_cell_index(7, 8), 3);
  EXPECT_THROW(sampled_cell_index(0, 3), std::invalid_argument);
}

TEST(ContTh, DerivedTiming) {
  LinkParams p;
  p.band = RateBand::from_ghz(2.0, 2.1, 2.2, 2.3);
  p.tau_s = kTau;
  p.tau_max = from_ps(50.0);
  const DerivedTiming t = derive_timing(p, FlipFlopTiming{});
  // tau_eff = 100 + 30 + 10 ps.
  EXPECT_NEAR(t.threshold, 0.0023 * 140.0 / 2.0, 1e-12);
  EXPECT_NEAR(t.sample_offset, t.threshold - 0.0023 * 10.0, 1e-12);
  EXPECT_NEAR(t.t_ctr_ps, 550.0, 1e-9);
  const DerivedTiming bare = derive_timing(p, FlipFlopTiming{Femtos::zero(), Femtos::zero(), Femtos::zero()});
  EXPECT_NEAR(bare.threshold, 0.0023 * 100.0 / 2.0, 1e-12);
  EXPECT_NEAR(bare.sample_offset, bare.threshold, 1e-12);
}

TEST(ClockedTh, StartsMetastableByDefault) {
  const ClockedTh ctl(cfg(), 0.0);
  EXPECT_EQ(ctl.outputs().md_rcv, Ternary::M);
  EXPECT_EQ(ctl.outputs().md_snd, Ternary::M);
  EXPECT_EQ(ctl.address(Femtos::zero()), 1);
}

TEST(ClockedTh, MoreThanHalfFullSpeedsUpTheReceiver) {
  for (bool gate : {false, true}) {
    LinkBuffer buf(2, kTau, kTau, gate);
    ClockedTh ctl(cfg(gate), 0.0);
    // The sender has already filled the sampled cell.
    buf.sender_access(1, Femtos::zero());
    const ControllerOutputs o = sample(ctl, buf, from_ps(400.0));
    EXPECT_EQ(o.md_rcv, Ternary::One) << gate;
    EXPECT_EQ(o.md_snd, Ternary::Zero) << gate;
  }
}

TEST(ClockedTh, LessThanHalfFullSpeedsUpTheSender) {
  for (bool gate : {false, true}) {
    LinkBuffer buf(2, kTau, kTau, gate);
    ClockedTh ctl(cfg(gate), 0.0);
    // The sampled cell (1) is still empty.
    const ControllerOutputs o = sample(ctl, buf, from_ps(400.0));
    EXPECT_EQ(o.md_rcv, Ternary::Zero) << gate;
    EXPECT_EQ(o.md_snd, Ternary::One) << gate;
  }
}

TEST(ClockedTh, FlagChangeInsideSetupGivesM) {
  LinkBuffer buf(2, kTau, kTau);
  ClockedTh ctl(cfg(), 0.0);
  sample(ctl, buf, from_ps(400.0));
  ASSERT_EQ(ctl.outputs().md_rcv, Ternary::Zero);

  // Sender access completes 10 ps before the next sample (setup is 30 ps).
  buf.sender_access(1, from_ps(700.0));
  const Femtos e = from_ps(810.0);
  EXPECT_TRUE(ctl.on_sample(buf, e));
  EXPECT_EQ(ctl.outputs().md_rcv, Ternary::M);
  ctl.resolve(buf);
  ctl.publish();
  EXPECT_EQ(ctl.outputs().md_rcv, Ternary::M);
  EXPECT_EQ(ctl.outputs().md_snd, Ternary::M);
}

TEST(ClockedTh, HoldViolationDetectedAtResolve) {
  LinkBuffer buf(2, kTau, Femtos::zero());
  ClockedTh ctl(cfg(), 0.0);
  buf.sender_access(1, Femtos::zero());
  sample(ctl, buf, from_ps(400.0));
  ASSERT_EQ(ctl.outputs().md_rcv, Ternary::One);
  const Femtos e = from_ps(800.0);
  EXPECT_FALSE(ctl.on_sample(buf, e));
  // A zero-time receiver access lands 5 ps after the edge, inside hold.
  buf.receiver_access(1, e + from_ps(5.0));
  EXPECT_TRUE(ctl.resolve(buf));
  EXPECT_EQ(ctl.ffs_stored(), Ternary::M);
}

TEST(ClockedTh, FallingEdgeTogglesTheAddress) {
  for (bool gate : {false, true}) {
    ClockedTh ctl(cfg(gate), 0.0);
    EXPECT_EQ(ctl.address(Femtos::zero()), 1);
    ctl.on_falling_edge(from_ps(200.0));
    EXPECT_EQ(ctl.address(from_ps(300.0)), 0);
    ctl.on_falling_edge(from_ps(600.0));
    EXPECT_EQ(ctl.address(from_ps(700.0)), 1);
    EXPECT_FALSE(ctl.ffa_metastable());
  }
}

TEST(ClockedTh, MetastableAddressGivesMAddress) {
  ClockedTh ctl(cfg(true), 0.0);
  ctl.on_falling_edge(from_ps(200.0));
  // Second edge inside the clock-to-q transition of the first.
  ctl.on_falling_edge(from_ps(205.0));
  EXPECT_TRUE(ctl.ffa_metastable());
  EXPECT_FALSE(ctl.address(from_ps(1000.0)).has_value());
  EXPECT_EQ(ctl.ffa_bit(from_ps(1000.0)), Ternary::M);
}

TEST(ClockedTh, Validation) {
  auto c = cfg(true);
  c.n = 4;
  EXPECT_THROW(ClockedTh(c, 0.0), std::invalid_argument);
  c = cfg();
  c.tau_max = from_ps(5.0);
  EXPECT_THROW(ClockedTh(c, 0.0), std::invalid_argument);
}

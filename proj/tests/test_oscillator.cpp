#include <gtest/gtest.h>

#include <cmath>

#include "mclink/oscillator.hpp"
#include "mclink/rng.hpp"

using namespace mclink;

namespace {

OscillatorState osc(Ternary initial, Femtos t_osc = from_ps(200.0)) {
  OscillatorState s;
  s.band = RateBand::from_ghz(2.0, 2.1, 2.2, 2.3);
  s.t_osc = t_osc;
  s.mode = ModeHistory(initial);
  return s;
}

// Brute force: walk the step femtosecond by femtosecond and report the
// first instant c reaches each half-integer.
std::vector<ClockEdge> brute_edges(double c0, double c1, Femtos t0, Femtos t1) {
  std::vector<ClockEdge> out;
  const auto span = (t1 - t0).count();
  double next = std::floor(2.0 * c0) / 2.0 + 0.5;
  for (std::int64_t k = 0; k <= span; ++k) {
    const double c = c0 + (c1 - c0) * static_cast<double>(k) / static_cast<double>(span);
    while (next <= c1 && c >= next - 1e-12) {
      const bool rising = std::floor(next) == next;
      out.push_back({t0 + Femtos{k}, rising ? EdgeKind::Rising : EdgeKind::Falling,
                     static_cast<std::int64_t>(std::floor(next))});
      next += 0.5;
    }
  }
  return out;
}

}  // namespace

TEST(Oscillator, LockStatusFollowsTheWindow) {
  auto s = osc(Ternary::Zero);
  EXPECT_EQ(lock_status(s, from_ps(0.0)), LockStatus::LockedSlow);

  s.mode.set(from_ps(100.0), Ternary::One);
  EXPECT_EQ(lock_status(s, from_ps(110.0)), LockStatus::Unlocked);
  EXPECT_EQ(lock_status(s, from_ps(299.999)), LockStatus::Unlocked);
  EXPECT_EQ(lock_status(s, from_ps(300.0)), LockStatus::LockedFast);
  EXPECT_EQ(next_lock_transition(s, from_ps(110.0)), from_ps(300.0));
  EXPECT_FALSE(next_lock_transition(s, from_ps(300.0)));
}

TEST(Oscillator, MAnywhereUnlocks) {
  auto s = osc(Ternary::Zero);
  s.mode.set(from_ps(50.0), Ternary::M);
  s.mode.set(from_ps(51.0), Ternary::Zero);
  EXPECT_EQ(lock_status(s, from_ps(200.0)), LockStatus::Unlocked);
  EXPECT_EQ(lock_status(s, from_ps(251.0)), LockStatus::LockedSlow);
  EXPECT_EQ(lock_status(osc(Ternary::M), from_ps(1e6)), LockStatus::Unlocked);
}

TEST(Oscillator, RecentFlipUnlocks) {
  auto s = osc(Ternary::One);
  s.mode.set(from_ps(990.0), Ternary::Zero);
  EXPECT_EQ(lock_status(s, from_ps(1000.0)), LockStatus::Unlocked);
}

TEST(Oscillator, HistoryMergesSameInstantChanges) {
  ModeHistory h(Ternary::Zero);
  h.set(from_ps(10.0), Ternary::M);
  h.set(from_ps(10.0), Ternary::Zero);
  EXPECT_EQ(h.segment_count(), 1u);
  EXPECT_EQ(h.value_at(from_ps(10.0)), Ternary::Zero);
  h.set(from_ps(20.0), Ternary::One);
  EXPECT_THROW(h.set(from_ps(15.0), Ternary::Zero), std::logic_error);
}

TEST(Oscillator, HistoryPrunes) {
  ModeHistory h(Ternary::Zero);
  for (int i = 1; i <= 10; ++i) h.set(from_ps(10.0 * i), i % 2 ? Ternary::One : Ternary::Zero);
  h.prune_before(from_ps(55.0));
  EXPECT_EQ(h.value_at(from_ps(55.0)), Ternary::One);
  EXPECT_EQ(h.segment_start(from_ps(55.0)), from_ps(50.0));
  EXPECT_EQ(h.current(), Ternary::Zero);
}

TEST(Oscillator, AdvanceDegenerateBands) {
  auto s = osc(Ternary::Zero);
  s.band = RateBand::from_ghz(2.0, 2.0, 2.3, 2.3);
  const RateNoise noise{NoiseStream(7, 0), from_ps(1.0)};
  advance(s, from_ps(0.0), from_ps(1.0), noise, 0.0);
  EXPECT_NEAR(s.c, 0.002, 1e-15);

  auto f = osc(Ternary::One);
  f.band = s.band;
  advance(f, from_ps(0.0), from_ps(500.0), noise, 0.0);
  EXPECT_NEAR(f.c, 1.15, 1e-12);
}

TEST(Oscillator, MaxRatePolicy) {
  auto s = osc(Ternary::M);
  s.unlocked_policy = UnlockedPolicy::MaxRate;
  const RateNoise noise{NoiseStream(1, 0), from_ps(1.0)};
  advance(s, from_ps(0.0), from_ps(1.0), noise, 0.0);
  EXPECT_NEAR(s.c, 0.0023, 1e-15);
  EXPECT_THROW(advance(s, from_ps(1.0), Femtos::zero(), noise, 0.0), std::invalid_argument);
}

TEST(Oscillator, RatesStayInTheirBands) {
  const RateBand b = RateBand::from_ghz(2.0, 2.1, 2.2, 2.3);
  NoiseStream rng(99, 3);
  for (auto policy : {UnlockedPolicy::UniformRandom, UnlockedPolicy::MaxRate, UnlockedPolicy::MinRate,
                      UnlockedPolicy::AdversarialTowardPeer}) {
    OscillatorState s;
    s.band = b;
    s.unlocked_policy = policy;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const double u = rng.uniform(i);
      s.c = rng.uniform(i + 100000);
      const double peer = rng.uniform(i + 200000);
      const double slow = select_rate(s, LockStatus::LockedSlow, u, peer);
      const double fast = select_rate(s, LockStatus::LockedFast, u, peer);
      const double free = select_rate(s, LockStatus::Unlocked, u, peer);
      EXPECT_TRUE(slow >= b.s_minus && slow <= b.s_plus);
      EXPECT_TRUE(fast >= b.f_minus && fast <= b.f_plus);
      EXPECT_TRUE(free >= b.s_minus && free <= b.f_plus);
    }
  }
}

TEST(Oscillator, AdversarialPushesApart) {
  OscillatorState s;
  s.band = RateBand::from_ghz(2.0, 2.1, 2.2, 2.3);
  s.unlocked_policy = UnlockedPolicy::AdversarialTowardPeer;
  s.is_sender = true;
  s.c = 1.0;
  EXPECT_EQ(select_rate(s, LockStatus::Unlocked, 0.5, 0.5), s.band.f_plus);
  EXPECT_EQ(select_rate(s, LockStatus::Unlocked, 0.5, 1.5), s.band.s_minus);
  EXPECT_EQ(select_rate(s, LockStatus::Unlocked, 0.5, 1.0), s.band.f_plus);
  s.is_sender = false;
  EXPECT_EQ(select_rate(s, LockStatus::Unlocked, 0.5, 1.0), s.band.s_minus);
}

TEST(Oscillator, EdgeEventsNamedCases) {
  const Femtos t0 = from_ps(0.0);
  const Femtos t1 = from_ps(1.0);
  auto e = edge_events(4.99, 5.01, t0, t1);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].kind, EdgeKind::Rising);
  EXPECT_EQ(e[0].cycle, 5);

  e = edge_events(4.40, 4.60, t0, t1);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].kind, EdgeKind::Falling);
  EXPECT_EQ(e[0].cycle, 4);

  e = edge_events(4.99, 6.01, t0, t1);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].kind, EdgeKind::Rising);
  EXPECT_EQ(e[1].kind, EdgeKind::Falling);
  EXPECT_EQ(e[2].kind, EdgeKind::Rising);
  EXPECT_TRUE(edge_events(5.0, 5.0, t0, t1).empty());
}

TEST(Oscillator, EdgeEventsMatchBruteForce) {
  NoiseStream rng(2024, 1);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const double c0 = 10.0 * rng.uniform(3 * i);
    const double c1 = c0 + 3.0 * rng.uniform(3 * i + 1);
    const Femtos t0{static_cast<std::int64_t>(1e5 * rng.uniform(3 * i + 2))};
    const Femtos t1 = t0 + Femtos{3000};
    const auto got = edge_events(c0, c1, t0, t1);
    const auto want = brute_edges(c0, c1, t0, t1);
    ASSERT_EQ(got.size(), want.size()) << c0 << " " << c1;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].kind, want[k].kind);
      EXPECT_EQ(got[k].cycle, want[k].cycle);
      EXPECT_LE(std::abs((got[k].time - want[k].time).count()), 1);
    }
  }
}

TEST(Oscillator, CrossingTime) {
  EXPECT_EQ(crossing_time(0.0, 0.002, from_ps(0.0), 1.0), from_ps(500.0));
  EXPECT_EQ(crossing_time(1.5, 0.002, from_ps(3.0), 1.0), from_ps(3.0));
}

TEST(Rng, CounterBasedAndSplit) {
  const NoiseStream a(5, 0);
  EXPECT_EQ(a.bits(17), NoiseStream(5, 0).bits(17));
  EXPECT_NE(a.bits(17), a.bits(18));
  EXPECT_NE(a.split(0).bits(1), a.split(1).bits(1));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  static_assert(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST(Oscillator, BandValidation) {
  EXPECT_THROW(RateBand::from_ghz(2.1, 2.0, 2.2, 2.3).validate(), std::invalid_argument);
  EXPECT_THROW(RateBand::from_ghz(0.0, 2.0, 2.2, 2.3).validate(), std::invalid_argument);
  EXPECT_NO_THROW(RateBand::from_ghz(2.0, 2.0, 2.0, 2.0).validate());
  EXPECT_EQ(unlocked_policy_from_string("adversarial_toward_peer"), UnlockedPolicy::AdversarialTowardPeer);
  EXPECT_THROW(unlocked_policy_from_string("fastest"), std::invalid_argument);
}

#include "mclink/sim_engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

namespace mclink {

std::string_view to_string(Fidelity f) { return f == Fidelity::GateLevel ? "gate-level" : "behavioral"; }

Fidelity fidelity_from_string(std::string_view name) {
  if (name == "behavioral") return Fidelity::Behavioral;
  if (name == "gate-level" || name == "gate_level") return Fidelity::GateLevel;
  throw std::invalid_argument("unknown fidelity '" + std::string(name) + "'");
}

double nominal_rate(const RateBand& band) { return 0.5 * (band.s_minus + band.f_plus); }

namespace {

constexpr Femtos kTimelineLimit{std::int64_t{1} << 62};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  require(step > Femtos::zero(), "step must be positive");
  require(noise_slot > Femtos::zero(), "noise slot must be positive");
  require(cycles.has_value() || duration.has_value(), "either cycles or duration must be set");
  require(!cycles || *cycles > 0, "cycles must be positive");
  require(!duration || (*duration > Femtos::zero() && *duration <= kTimelineLimit),
          "duration must be positive and at most 2^62 fs");
  require(trace.stride > 0, "trace stride must be positive");
  require(ffs_timing.setup >= Femtos::zero() && ffs_timing.hold >= Femtos::zero() &&
              ffs_timing.clk_to_q >= Femtos::zero(),
          "flip-flop times must be >= 0");

  const double fp = params.band.f_plus;
  const DerivedTiming dt = derive_timing(params, ffs_timing);
  const double cycle_min_ps = 1.0 / fp;
  require(params.tau_max >= ffs_timing.hold, "tau_max must be at least the ffs hold time");
  require(to_ps(params.tau_max) < cycle_min_ps,
          "tau_max must be shorter than the fastest clock period " + std::to_string(cycle_min_ps) + " ps");
  require(dt.sample_offset > -0.5 && dt.sample_offset < 0.5,
          "ffs sample offset " + std::to_string(dt.sample_offset) + " cycles must lie in (-0.5, 0.5)");
  require((0.5 + dt.sample_offset) / fp > to_ps(ffa_timing.clk_to_q + ffs_timing.setup),
          "ffa settles too late for the ffs sample");
  const double half = static_cast<double>(params.n) / 2.0;
  require(to_ps(params.tau_r + ffs_timing.setup) < (half + dt.sample_offset) / fp,
          "receiver access window overlaps the ffs sample of the same cell");
  require(to_ps(ffs_timing.hold) < (half - dt.sample_offset) / fp,
          "ffs hold window overlaps the next receiver access of the sampled cell");
}

std::uint64_t RunResult::total_violations() const {
  std::uint64_t s = 0;
  for (auto c : violation_counts) s += c;
  return s;
}

namespace {

enum class EventKind : std::uint8_t {
  FlagSettle,
  EdgeSndRise,
  EdgeRcvRise,
  EdgeRcvFall,
  CtrlSample,
  CtrlLatch,
  CtrlOutput,
};

struct Event {
  Femtos time;
  EventKind kind;
  std::uint64_t seq;
  std::int64_t arg;
};

struct LaterFirst {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.kind, a.seq) > std::tie(b.time, b.kind, b.seq);
  }
};

/// Piecewise-linear clock. c(t) is always evaluated from the anchor set at
/// the last rate change, so splitting a step does not change c.
struct Clock {
  OscillatorState osc;
  RateNoise noise;
  Femtos anchor_t{};
  double anchor_c = 0.0;
  double rate = 0.0;
  double rate_fs = 0.0;
  std::uint64_t anchor_slot = std::numeric_limits<std::uint64_t>::max();

  double at(Femtos t) const { return anchor_c + rate_fs * static_cast<double>((t - anchor_t).count()); }

  void reanchor(Femtos now, double c_now, double r, std::uint64_t slot) {
    if (slot != anchor_slot || r != rate) {
      anchor_t = now;
      anchor_c = c_now;
      rate = r;
      rate_fs = r * 1e-3;
      anchor_slot = slot;
    }
  }

  Femtos crossing(double target) const {
    return anchor_t + Femtos{static_cast<std::int64_t>(std::ceil((target - anchor_c) / rate * 1e3))};
  }
};

struct Tap {
  double phase;
  std::int64_t k;
  EventKind kind;
  bool receiver;
  double target() const { return static_cast<double>(k) + phase; }
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg), buf_(make_buffer(cfg)), ctrl_(make_ctrl(cfg)), mon_(make_mon()) {}

  RunResult run();

 private:
  static LinkBuffer make_buffer(const SimConfig& cfg) {
    cfg.validate();
    return LinkBuffer(cfg.params.n, cfg.params.tau_s, cfg.params.tau_r, cfg.fidelity == Fidelity::GateLevel);
  }

  ClockedTh make_ctrl(const SimConfig& cfg) {
    const auto& p = cfg.params;
    timing_ = derive_timing(p, cfg.ffs_timing);
    const double shift = cfg.initial_offset_ps * nominal_rate(p.band);
    c_r0_ = 0.0;
    c_s0_ = cfg.alignment == Alignment::Collision ? shift - static_cast<double>(p.n) / 2.0 : shift;
    ClockedThConfig cc;
    cc.n = p.n;
    cc.tau_max = p.tau_max;
    cc.ffa_timing = cfg.ffa_timing;
    cc.ffs_timing = cfg.ffs_timing;
    cc.sample_offset = timing_.sample_offset;
    cc.gate_level = cfg.fidelity == Fidelity::GateLevel && p.n == 2;
    cc.ffs_initial = cfg.ffs_initial;
    return ClockedTh(cc, c_r0_);
  }

  LinkMonitor make_mon() {
    const auto& p = cfg_.params;
    const LinkParams eff = effective_params(p, cfg_.ffs_timing);
    bounds_ = derive_bounds(p);
    const bool c1 = cfg_.alignment == Alignment::HalfFull && std::abs(c_s0_ - c_r0_) <= p.delta;
    armed_ = c1 && !feasible_threshold_range(eff, p.n).empty;
    MonitorConfig mc;
    mc.n = p.n;
    mc.f_plus = p.band.f_plus;
    mc.max_tau_ps = to_ps(std::max(p.tau_s, p.tau_r));
    mc.lemma_bound = static_cast<double>(p.n) / 2.0 - p.band.f_plus * to_ps(std::max(eff.tau_s, eff.tau_r));
    mc.l1_threshold = timing_.threshold;
    mc.t_ctr = Femtos{static_cast<std::int64_t>(std::ceil(timing_.t_ctr_ps * 1e3))};
    mc.tau_r = p.tau_r;
    mc.armed = armed_;
    mc.seed = cfg_.seed;
    mc.max_stored = cfg_.max_stored_violations;
    return LinkMonitor(mc);
  }

  void push(Femtos t, EventKind kind, std::int64_t arg = 0) { queue_.push(Event{t, kind, seq_++, arg}); }
  void apply_modes(Femtos t);
  void handle(const Event& e);
  bool drain(Femtos now);
  void record(Femtos now);
  void check_refinement(Femtos now);

  SimConfig cfg_;
  DerivedTiming timing_{};
  DerivedBounds bounds_{};
  bool armed_ = false;
  double c_s0_ = 0.0;
  double c_r0_ = 0.0;
  LinkBuffer buf_;
  ClockedTh ctrl_;
  LinkMonitor mon_;
  Clock snd_{};
  Clock rcv_{};
  std::vector<Tap> taps_;
  double tap_min_s = 0.0;
  double tap_min_r = 0.0;

  void update_tap_min() {
    tap_min_s = tap_min_r = std::numeric_limits<double>::infinity();
    for (const Tap& t : taps_) (t.receiver ? tap_min_r : tap_min_s) = std::min(t.receiver ? tap_min_r : tap_min_s, t.target());
  }
  std::priority_queue<Event, std::vector<Event>, LaterFirst> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t step_ = 0;
  Femtos now_{};
  bool refinement_failed_ = false;
  bool ffa_reported_ = false;
  std::optional<Trace> trace_;
  std::vector<FillSample> fill_;
};

void Engine::apply_modes(Femtos t) {
  const ControllerOutputs md = ctrl_.outputs();
  snd_.osc.mode.set(t, md.md_snd);
  rcv_.osc.mode.set(t, md.md_rcv);
}

void Engine::handle(const Event& e) {
  const double c_s = snd_.at(e.time);
  const double c_r = rcv_.at(e.time);
  const std::int64_t n = cfg_.params.n;
  switch (e.kind) {
    case EventKind::FlagSettle: buf_.settle(e.arg, e.time); break;
    case EventKind::EdgeSndRise:
    case EventKind::EdgeRcvRise: {
      const bool sender = e.kind == EventKind::EdgeSndRise;
      const std::int64_t cell = wrap_index(sender ? e.arg + n / 2 : e.arg, n);
      const AccessRecord rec = sender ? buf_.sender_access(cell, e.time) : buf_.receiver_access(cell, e.time);
      mon_.on_access(rec, c_s, c_r, step_);
      if (rec.completes_at > e.time) push(rec.completes_at, EventKind::FlagSettle, cell);
      break;
    }
    case EventKind::EdgeRcvFall:
      ctrl_.on_falling_edge(e.time);
      if (ctrl_.ffa_metastable() && !ffa_reported_) {
        ffa_reported_ = true;
        mon_.report(ViolationKind::Internal, e.time, c_s, c_r, step_, -1, "address flip-flop went metastable");
      }
      break;
    case EventKind::CtrlSample:
      if (ctrl_.on_sample(buf_, e.time)) apply_modes(e.time);
      push(e.time + cfg_.ffs_timing.hold, EventKind::CtrlLatch);
      push(e.time + cfg_.params.tau_max, EventKind::CtrlOutput);
      break;
    case EventKind::CtrlLatch:
      if (ctrl_.resolve(buf_)) apply_modes(e.time);
      break;
    case EventKind::CtrlOutput:
      if (ctrl_.publish()) apply_modes(e.time);
      break;
  }
}

bool Engine::drain(Femtos now) {
  bool any = false;
  while (!queue_.empty() && queue_.top().time <= now) {
    const Event e = queue_.top();
    queue_.pop();
    handle(e);
    any = true;
  }
  return any;
}

void Engine::check_refinement(Femtos now) {
  if (refinement_failed_ || mon_.buffer_violated()) return;
  for (std::int64_t i = 0; i < cfg_.params.n; ++i) {
    const Ternary b = buf_.behavioral_flag(i, now);
    if (!is_stable(b)) continue;
    const Ternary g = *buf_.gate_flag(i, now);
    if (g != b) {
      refinement_failed_ = true;
      mon_.report(ViolationKind::Internal, now, snd_.at(now), rcv_.at(now), step_, i,
                  "gate-level flag " + std::string(to_string(g)) + " disagrees with stable flag " +
                      std::string(to_string(b)));
      return;
    }
  }
}

void Engine::record(Femtos now) {
  if (trace_ && step_ % static_cast<std::uint64_t>(cfg_.trace.stride) == 0) {
    trace_->time.push_back(now);
    trace_->c_s.push_back(snd_.at(now));
    trace_->c_r.push_back(rcv_.at(now));
    trace_->md.push_back(ctrl_.outputs());
    for (std::int64_t i = 0; i < cfg_.params.n; ++i) trace_->flags.push_back(buf_.read_flag(i, now));
  }
  if (cfg_.record_fill) {
    fill_.push_back({now, static_cast<double>(cfg_.params.n) / 2.0 + snd_.at(now) - rcv_.at(now)});
  }
}

RunResult Engine::run() {
  const auto& p = cfg_.params;
  const NoiseStream root(cfg_.seed, 0);
  for (Clock* c : {&snd_, &rcv_}) {
    const bool sender = c == &snd_;
    c->osc.band = p.band;
    c->osc.t_osc = p.t_osc;
    c->osc.unlocked_policy = sender ? cfg_.policy_snd : cfg_.policy_rcv;
    c->osc.is_sender = sender;
    c->osc.mode = ModeHistory(sender ? ctrl_.outputs().md_snd : ctrl_.outputs().md_rcv);
    c->noise = RateNoise{root.split(sender ? 0 : 1), cfg_.noise_slot};
    c->anchor_c = c->osc.c = sender ? c_s0_ : c_r0_;
  }
  buf_.reset_by_first_access(c_s0_ + static_cast<double>(p.n) / 2.0, c_r0_);

  auto first_k = [](double c0, double phase) { return static_cast<std::int64_t>(std::ceil(c0 - phase)); };
  taps_ = {
      {0.0, first_k(c_s0_, 0.0), EventKind::EdgeSndRise, false},
      {0.0, first_k(c_r0_, 0.0), EventKind::EdgeRcvRise, true},
      {0.5, first_k(c_r0_, 0.5), EventKind::EdgeRcvFall, true},
      {timing_.sample_offset, first_k(c_r0_, timing_.sample_offset), EventKind::CtrlSample, true},
  };

  if (cfg_.trace.enabled) {
    trace_.emplace();
    trace_->n = p.n;
  }

  const Femtos end = cfg_.duration.value_or(kTimelineLimit);
  const double c_r_stop =
      cfg_.cycles ? c_r0_ + static_cast<double>(*cfg_.cycles) : std::numeric_limits<double>::infinity();

  now_ = Femtos::zero();
  for (Tap& tap : taps_) {
    const double c0 = tap.receiver ? c_r0_ : c_s0_;
    if (tap.target() <= c0) {
      push(now_, tap.kind, tap.k);
      ++tap.k;
    }
  }
  drain(now_);
  update_tap_min();
  mon_.start(now_, c_s0_, c_r0_, ctrl_.outputs());
  record(now_);

  std::array<Femtos, 4> crossing{};
  LockStatus st_s = LockStatus::Unlocked;
  LockStatus st_r = LockStatus::Unlocked;
  Femtos horizon = now_;
  bool dirty = true;
  std::uint64_t slot = 0;
  Femtos slot_end = now_;
  double u_s = 0.0;
  double u_r = 0.0;
  double cs = c_s0_;
  double cr = c_r0_;
  while (now_ < end && cr < c_r_stop) {
    if (cfg_.halt_on_violation && mon_.buffer_violated()) break;

    // Lock status, queued events and L1 obligations only move at known times.
    if (dirty || now_ >= horizon) {
      for (Clock* c : {&snd_, &rcv_}) {
        if (c->osc.mode.segment_count() > 64) c->osc.mode.prune_before(now_ - p.t_osc - Femtos{1});
      }
      st_s = lock_status(snd_.osc, now_);
      st_r = lock_status(rcv_.osc, now_);
      horizon = end;
      if (!queue_.empty()) horizon = std::min(horizon, queue_.top().time);
      for (const Clock* c : {&snd_, &rcv_}) {
        if (auto lt = next_lock_transition(c->osc, now_)) horizon = std::min(horizon, *lt);
      }
      if (mon_.l1_armed()) {
        if (auto ob = mon_.next_obligation(now_)) horizon = std::min(horizon, *ob);
      }
      dirty = false;
    }

    if (now_ >= slot_end) {
      slot = snd_.noise.slot_index(now_);
      slot_end = snd_.noise.slot_end(now_);
      u_s = snd_.noise.stream.uniform(slot);
      u_r = rcv_.noise.stream.uniform(slot);
    }
    snd_.osc.c = cs;
    rcv_.osc.c = cr;
    snd_.reanchor(now_, cs, select_rate(snd_.osc, st_s, u_s, cr), slot);
    rcv_.reanchor(now_, cr, select_rate(rcv_.osc, st_r, u_r, cs), slot);

    Femtos next = std::min({now_ + cfg_.step, slot_end, horizon});
    cs = snd_.at(next);
    cr = rcv_.at(next);
    if (cs >= tap_min_s || cr >= tap_min_r) {
      for (std::size_t i = 0; i < taps_.size(); ++i) {
        const Clock& c = taps_[i].receiver ? rcv_ : snd_;
        crossing[i] = Femtos::max();
        if (c.at(next) >= taps_[i].target()) {
          crossing[i] = std::max(c.crossing(taps_[i].target()), now_ + Femtos{1});
          next = std::min(next, crossing[i]);
        }
      }
      for (std::size_t i = 0; i < taps_.size(); ++i) {
        if (crossing[i] <= next) {
          push(next, taps_[i].kind, taps_[i].k);
          ++taps_[i].k;
        }
      }
      update_tap_min();
      cs = snd_.at(next);
      cr = rcv_.at(next);
    }

    now_ = next;
    ++step_;
    if (!queue_.empty() && queue_.top().time <= now_) {
      drain(now_);
      dirty = true;
    }
    if (mon_.on_step(now_, cs, cr, ctrl_.outputs(), step_)) dirty = true;
    if (cfg_.fidelity == Fidelity::GateLevel) check_refinement(now_);
    if (trace_ || cfg_.record_fill) record(now_);
  }

  RunResult r;
  r.config = cfg_;
  r.bounds = bounds_;
  r.timing = timing_;
  r.armed = armed_;
  r.c_s0 = c_s0_;
  r.c_r0 = c_r0_;
  r.stats = mon_.stats(c_s0_, c_r0_);
  r.violations = mon_.events();
  for (std::size_t k = 0; k < kViolationKinds; ++k) r.violation_counts[k] = mon_.count(static_cast<ViolationKind>(k));
  r.steps = step_;
  r.trace = std::move(trace_);
  r.fill = std::move(fill_);
  return r;
}

}  // namespace

RunResult run(const SimConfig& config) {
  Engine engine(config);
  return engine.run();
}

Stabilization find_stabilization(const std::vector<FillSample>& curve, Femtos hold_window, double band) {
  Stabilization s;
  if (curve.size() < 2) return s;
  const Femtos t_end = curve.back().time;
  // Settled level: mean over the second half of the run, at least the hold window.
  const Femtos half = curve.front().time + (t_end - curve.front().time) / 2;
  const Femtos window_start = std::max(curve.front().time, std::min(half, t_end - hold_window));

  double area = 0.0;
  double span = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].time <= window_start) continue;
    const auto a = std::max(curve[i - 1].time, window_start);
    const double dt = static_cast<double>((curve[i].time - a).count());
    area += 0.5 * (curve[i].fill + curve[i - 1].fill) * dt;
    span += dt;
  }
  s.settled = span > 0.0 ? area / span : curve.back().fill;

  auto outside = [&](double f) { return std::abs(f - s.settled) > band; };
  // Earliest entry into the band that is followed by a full hold window
  // without leaving it.
  std::optional<Femtos> entry;
  if (!outside(curve.front().fill)) entry = curve.front().time;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const FillSample& a = curve[i - 1];
    const FillSample& b = curve[i];
    if (outside(b.fill)) {
      entry.reset();
      continue;
    }
    if (!entry) {
      const double edge = a.fill > s.settled ? s.settled + band : s.settled - band;
      const double frac = std::clamp((edge - a.fill) / (b.fill - a.fill), 0.0, 1.0);
      entry = a.time + Femtos{static_cast<std::int64_t>(std::llround(frac * static_cast<double>((b.time - a.time).count())))};
    }
    if (b.time - *entry >= hold_window) {
      s.stabilized = true;
      s.time = *entry;
      return s;
    }
  }
  return s;
}

std::vector<SweepRow> sweep_initial_offset(const SimConfig& base, const std::vector<double>& offsets_ps,
                                           const SweepOptions& options) {
  std::vector<SweepRow> rows(offsets_ps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < offsets_ps.size(); i = next++) {
      SimConfig cfg = base;
      cfg.alignment = Alignment::Collision;
      cfg.initial_offset_ps = offsets_ps[i];
      cfg.record_fill = true;
      cfg.max_stored_violations = std::numeric_limits<std::size_t>::max();
      cfg.trace.enabled = false;
      RunResult res = run(cfg);

      SweepRow& row = rows[i];
      row.offset_ps = offsets_ps[i];
      const double rcv_rate = res.stats.avg_frequency_rcv_ghz > 0.0 ? res.stats.avg_frequency_rcv_ghz * 1e-3
                                                                     : nominal_rate(cfg.params.band);
      const Femtos hold{static_cast<std::int64_t>(std::ceil(static_cast<double>(options.hold_cycles) / rcv_rate * 1e3))};
      const Stabilization st = find_stabilization(res.fill, hold, options.band);
      row.stabilized = st.stabilized;
      row.stabilization_time_ns = to_ns(st.time);
      row.final_gap_cycles = st.settled;
      for (const auto& v : res.violations) {
        if (v.time >= st.time) ++row.violations;
      }
      if (options.keep_curves) row.curve = std::move(res.fill);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, offsets_ps.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace mclink

#include "mclink/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mclink {

std::optional<ControllerOutputs> cont_th_reference(double c_s, double c_r, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (c_s - c_r >= threshold) return ControllerOutputs{Ternary::Zero, Ternary::One};
  if (c_r - c_s >= threshold) return ControllerOutputs{Ternary::One, Ternary::Zero};
  return std::nullopt;
}

std::int64_t sampled_cell_index(std::int64_t receiver_address, std::int64_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ring size must be even and >= 2");
  return wrap_index(receiver_address + n / 2, n);
}

LinkParams effective_params(const LinkParams& p, const FlipFlopTiming& ffs) {
  LinkParams e = p;
  e.tau_s = p.tau_s + ffs.setup + ffs.hold;
  return e;
}

DerivedTiming derive_timing(const LinkParams& p, const FlipFlopTiming& ffs) {
  const double fp = p.band.f_plus;
  DerivedTiming d;
  d.t_ctr_ps = t_ctr_ps(p);
  d.threshold = fp * to_ps(p.tau_s + ffs.setup + ffs.hold) / 2.0;
  d.sample_offset = d.threshold - fp * to_ps(ffs.hold);
  return d;
}

ClockedTh::ClockedTh(const ClockedThConfig& cfg, double c_r0) : cfg_(cfg) {
  if (cfg.n < 2 || cfg.n % 2 != 0) throw std::invalid_argument("ring size must be even and >= 2");
  if (cfg.gate_level && cfg.n != 2) throw std::invalid_argument("gate-level controller needs n == 2");
  if (cfg.tau_max < cfg.ffs_timing.hold) throw std::invalid_argument("tau_max must be >= ffs hold time");
  const auto first_fall = static_cast<std::int64_t>(std::ceil(c_r0 - 0.5));
  counter_ = sampled_cell_index(wrap_index(first_fall, cfg.n), cfg.n);
  ffa_ = FlipFlop::initialized(counter_ == 1 ? Ternary::One : Ternary::Zero, cfg.ffa_timing);
  ffs_ = FlipFlop::initialized(cfg.ffs_initial, cfg.ffs_timing);
  set_outputs(cfg.ffs_initial);
}

void ClockedTh::set_outputs(Ternary v) {
  outputs_.md_rcv = v;
  outputs_.md_snd = gate_closure(gates::not_gate(), {v});
}

void ClockedTh::on_falling_edge(Femtos t) {
  if (cfg_.gate_level) {
    const Ternary q = ffa_.output(t);
    ffa_ = ff_latch(ffa_, gate_closure(gates::not_gate(), {q}), ffa_.output_last_change(t), t);
    if (ffa_.stored == Ternary::M) ffa_metastable_ = true;
  } else {
    counter_ = wrap_index(counter_ + 1, cfg_.n);
    counter_changed_ = t + cfg_.ffa_timing.clk_to_q;
  }
}

std::optional<std::int64_t> ClockedTh::address(Femtos t) const {
  if (!cfg_.gate_level) return counter_;
  switch (ffa_.output(t)) {
    case Ternary::Zero: return 0;
    case Ternary::One: return 1;
    case Ternary::M: break;
  }
  return std::nullopt;
}

Ternary ClockedTh::mux_output(const LinkBuffer& buf, Femtos t) const {
  if (cfg_.gate_level) {
    return gate_closure(gates::mux2(), {ffa_.output(t), buf.read_flag(0, t), buf.read_flag(1, t)});
  }
  return buf.read_flag(counter_, t);
}

Femtos ClockedTh::mux_last_change(const LinkBuffer& buf, Femtos t) const {
  if (cfg_.gate_level) {
    return std::max({ffa_.output_last_change(t), buf.last_flag_change(0, t), buf.last_flag_change(1, t)});
  }
  return std::max(counter_changed_ <= t ? counter_changed_ : Femtos::min(), buf.last_flag_change(counter_, t));
}

bool ClockedTh::on_sample(const LinkBuffer& buf, Femtos e) {
  const Ternary d = mux_output(buf, e);
  const Femtos lc = mux_last_change(buf, e);
  const bool early_change = lc != Femtos::min() && lc > e - cfg_.ffs_timing.setup;
  const Ternary provisional = early_change ? Ternary::M : d;
  bool went_m = false;
  if (provisional != ffs_.stored && outputs_.md_rcv != Ternary::M) {
    set_outputs(Ternary::M);
    went_m = true;
  }
  pending_ = Pending{e, d, went_m || outputs_.md_rcv == Ternary::M};
  return went_m;
}

bool ClockedTh::resolve(const LinkBuffer& buf) {
  if (!pending_) return false;
  const Pending p = *pending_;
  // Changes at exactly e + hold fall outside the open window.
  const Femtos probe = p.edge + cfg_.ffs_timing.hold - Femtos{1};
  ffs_ = ff_latch(ffs_, p.d, mux_last_change(buf, probe), p.edge);
  if (ffs_.stored != ffs_.previous && !p.md_went_m && outputs_.md_rcv != Ternary::M) {
    set_outputs(Ternary::M);
    return true;
  }
  return false;
}

bool ClockedTh::publish() {
  if (!pending_) return false;
  pending_.reset();
  const ControllerOutputs before = outputs_;
  set_outputs(ffs_.stored);
  return !(before == outputs_);
}

}  // namespace mclink

#include "mclink/link_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mclink {

std::string_view to_string(Validity v) { return v == Validity::Valid ? "valid" : "invalid"; }

std::string_view to_string(Party p) {
  switch (p) {
    case Party::Sender: return "sender";
    case Party::Receiver: return "receiver";
    case Party::None: break;
  }
  return "none";
}

namespace {

Ternary flag_of(Validity v) { return v == Validity::Valid ? Ternary::One : Ternary::Zero; }

}  // namespace

GateLevelCell GateLevelCell::initialized(Validity v, Femtos tau_s, Femtos tau_r) {
  GateLevelCell g;
  g.snd = FlipFlop::initialized(v == Validity::Valid ? Ternary::One : Ternary::Zero,
                                FlipFlopTiming{Femtos::zero(), Femtos::zero(), tau_s});
  g.rcv = FlipFlop::initialized(Ternary::Zero, FlipFlopTiming{Femtos::zero(), Femtos::zero(), tau_r});
  return g;
}

void GateLevelCell::sender_step(Femtos t) {
  const Ternary d = gate_closure(gates::not_gate(), {rcv.output(t)});
  snd = ff_latch(snd, d, rcv.output_last_change(t), t);
}

void GateLevelCell::receiver_step(Femtos t) { rcv = ff_latch(rcv, snd.output(t), snd.output_last_change(t), t); }

Ternary GateLevelCell::flag(Femtos t) const { return gate_closure(gates::xor2(), {snd.output(t), rcv.output(t)}); }

Femtos GateLevelCell::last_change(Femtos t) const {
  return std::max(snd.output_last_change(t), rcv.output_last_change(t));
}

LinkBuffer::LinkBuffer(std::int64_t n, Femtos tau_s, Femtos tau_r, bool gate_level)
    : n_(n), tau_s_(tau_s), tau_r_(tau_r) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ring size must be even and >= 2, got " + std::to_string(n));
  if (tau_s < Femtos::zero() || tau_r < Femtos::zero()) throw std::invalid_argument("access times must be >= 0");
  cells_.resize(static_cast<std::size_t>(n));
  if (gate_level) gates_.resize(static_cast<std::size_t>(n));
  reset_half_full();
}

void LinkBuffer::reset(const std::vector<Validity>& v) {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    cells_[i] = Cell{};
    cells_[i].validity = v[i];
    cells_[i].flag = flag_of(v[i]);
    if (!gates_.empty()) gates_[i] = GateLevelCell::initialized(v[i], tau_s_, tau_r_);
  }
}

void LinkBuffer::reset_half_full() {
  std::vector<Validity> v(cells_.size(), Validity::Invalid);
  std::fill(v.begin(), v.begin() + n_ / 2, Validity::Valid);
  reset(v);
}

void LinkBuffer::reset_by_first_access(double p_s0, double p_r0) {
  // Distance from p0 to the next integer m >= p0 with m = l (mod N).
  auto distance = [&](double p0, std::int64_t l) {
    const double base = std::ceil(p0);
    const auto shift = wrap_index(l - static_cast<std::int64_t>(base), n_);
    return base + static_cast<double>(shift) - p0;
  };
  std::vector<Validity> v(cells_.size());
  for (std::int64_t l = 0; l < n_; ++l) {
    const double ds = distance(p_s0, l);
    const double dr = distance(p_r0, l);
    v[static_cast<std::size_t>(l)] = dr < ds ? Validity::Valid : Validity::Invalid;
  }
  reset(v);
}

std::int64_t LinkBuffer::checked(std::int64_t i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("cell index " + std::to_string(i) + " out of range");
  return i;
}

void LinkBuffer::settle(std::int64_t i, Femtos t) {
  Cell& c = cells_[static_cast<std::size_t>(checked(i))];
  if (!c.pending_validity || t < c.busy_until) return;
  c.validity = *c.pending_validity;
  c.flag = flag_of(c.validity);
  c.flag_changed_at = c.busy_until;
  c.pending_validity.reset();
}

AccessRecord LinkBuffer::access(Party who, std::int64_t i, Femtos t) {
  settle(i, t);
  Cell& c = cells_[static_cast<std::size_t>(i)];
  const bool sender = who == Party::Sender;
  const Femtos tau = sender ? tau_s_ : tau_r_;
  const bool busy = c.pending_validity.has_value();

  AccessRecord rec;
  rec.party = who;
  rec.cell = i;
  rec.time = t;
  rec.found = c.validity;
  rec.violation = sender ? c.validity == Validity::Valid : c.validity == Validity::Invalid;
  rec.reentrant = busy && c.last_accessor == who;
  rec.previous_accessor = c.last_accessor;
  rec.previous_access = c.last_access;

  const Validity result = sender ? Validity::Valid : Validity::Invalid;
  if (tau == Femtos::zero() && !busy) {
    if (c.flag != flag_of(result)) c.flag_changed_at = t;
    c.validity = result;
    c.flag = flag_of(result);
    rec.completes_at = t;
  } else {
    if (!busy) c.busy_from = t;
    c.busy_until = busy ? std::max(c.busy_until, t + tau) : t + tau;
    c.pending_validity = result;
    rec.completes_at = c.busy_until;
  }
  c.last_accessor = who;
  c.last_access = t;

  if (!gates_.empty()) {
    auto& g = gates_[static_cast<std::size_t>(i)];
    sender ? g.sender_step(t) : g.receiver_step(t);
  }
  return rec;
}

AccessRecord LinkBuffer::sender_access(std::int64_t cell, Femtos t) { return access(Party::Sender, checked(cell), t); }

AccessRecord LinkBuffer::receiver_access(std::int64_t cell, Femtos t) {
  return access(Party::Receiver, checked(cell), t);
}

Ternary LinkBuffer::read_flag(std::int64_t i, Femtos t) const {
  if (!gates_.empty()) return gates_[static_cast<std::size_t>(checked(i))].flag(t);
  return behavioral_flag(i, t);
}

Femtos LinkBuffer::last_flag_change(std::int64_t i, Femtos t) const {
  if (!gates_.empty()) return gates_[static_cast<std::size_t>(checked(i))].last_change(t);
  return behavioral_last_change(i, t);
}

Ternary LinkBuffer::behavioral_flag(std::int64_t i, Femtos t) const {
  const Cell& c = cells_[static_cast<std::size_t>(checked(i))];
  if (c.pending_validity) {
    if (t >= c.busy_until) return flag_of(*c.pending_validity);
    if (t >= c.busy_from) return Ternary::M;
  }
  return c.flag;
}

Femtos LinkBuffer::behavioral_last_change(std::int64_t i, Femtos t) const {
  const Cell& c = cells_[static_cast<std::size_t>(checked(i))];
  if (c.pending_validity) {
    if (t >= c.busy_until) return c.busy_until;
    if (t >= c.busy_from) return c.busy_from;
  }
  return c.flag_changed_at;
}

Validity LinkBuffer::validity(std::int64_t i, Femtos t) const {
  const Cell& c = cells_[static_cast<std::size_t>(checked(i))];
  if (c.pending_validity && t >= c.busy_until) return *c.pending_validity;
  return c.validity;
}

std::optional<Ternary> LinkBuffer::gate_flag(std::int64_t i, Femtos t) const {
  if (gates_.empty()) return std::nullopt;
  return gates_[static_cast<std::size_t>(checked(i))].flag(t);
}

}  // namespace mclink

#include "mclink/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mclink {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::P1Underrun: return "P1_UNDERRUN";
    case ViolationKind::P2Overflow: return "P2_OVERFLOW";
    case ViolationKind::Lemma1Bound: return "LEMMA1_BOUND";
    case ViolationKind::Separation: return "SEPARATION";
    case ViolationKind::L1Conformance: return "L1_CONFORMANCE";
    case ViolationKind::Internal: break;
  }
  return "INTERNAL";
}

bool check_lemma1(double c_s, double c_r, std::int64_t n, double f_plus, double max_tau_ps) {
  return std::abs(c_s - c_r) <= static_cast<double>(n) / 2.0 - f_plus * max_tau_ps;
}

Femtos interpolate_crossing(Femtos t0, double d0, Femtos t1, double d1, double level) {
  if (d1 == d0) return t1;
  const double frac = std::clamp((level - d0) / (d1 - d0), 0.0, 1.0);
  return t0 + Femtos{static_cast<std::int64_t>(std::ceil(frac * static_cast<double>((t1 - t0).count())))};
}

void L1Tracker::start(Femtos t, double diff) {
  last_t_ = t;
  last_diff_ = diff;
  pos_since_ = diff >= threshold_ ? std::optional<Femtos>(t) : std::nullopt;
  neg_since_ = diff <= -threshold_ ? std::optional<Femtos>(t) : std::nullopt;
}

LinkMonitor::LinkMonitor(const MonitorConfig& cfg)
    : cfg_(cfg),
      l1_(cfg.l1_threshold),
      last_write_(static_cast<std::size_t>(cfg.n), Femtos::min()),
      half_n_(static_cast<double>(cfg.n) / 2.0) {
  // Inside [ok_lo_, ok_hi_] both bound checks pass without further work.
  const double margin = cfg.f_plus * cfg.max_tau_ps;
  ok_lo_ = std::max(-cfg.lemma_bound, margin - half_n_);
  ok_hi_ = std::min(cfg.lemma_bound, half_n_ - margin);
}

void LinkMonitor::start(Femtos t, double c_s, double c_r, ControllerOutputs md) {
  t0_ = last_t_ = t;
  last_c_s_ = c_s;
  last_c_r_ = c_r;
  last_fill_ = half_n_ + (c_s - c_r);
  diff_min_ = diff_max_ = c_s - c_r;
  md_ = md;
  l1_.start(t, c_s - c_r);
}

void LinkMonitor::report(ViolationKind kind, Femtos t, double c_s, double c_r, std::uint64_t step, std::int64_t cell,
                         std::string detail) {
  ++counts_[static_cast<std::size_t>(kind)];
  if (kind == ViolationKind::P1Underrun || kind == ViolationKind::P2Overflow || kind == ViolationKind::Lemma1Bound) {
    tripped_ = true;
  }
  if (events_.size() >= cfg_.max_stored) return;
  events_.push_back(ViolationEvent{kind, t, cfg_.seed, step, c_s, c_r, cell, md_, std::move(detail)});
}

void LinkMonitor::on_access(const AccessRecord& rec, double c_s, double c_r, std::uint64_t step) {
  const bool sender = rec.party == Party::Sender;
  const auto idx = static_cast<std::size_t>(rec.cell);
  if (rec.reentrant) {
    report(ViolationKind::Internal, rec.time, c_s, c_r, step, rec.cell,
           std::string(to_string(rec.party)) + " re-accessed a cell before its previous access completed");
  }
  const bool proven = cfg_.armed && !tripped_;
  if (proven && rec.previous_accessor == rec.party) {
    report(ViolationKind::Separation, rec.time, c_s, c_r, step, rec.cell,
           "accesses do not alternate: two consecutive " + std::string(to_string(rec.party)) + " accesses");
  } else if (proven && rec.previous_accessor != Party::None &&
             to_ps(rec.time - rec.previous_access) < cfg_.max_tau_ps) {
    report(ViolationKind::Separation, rec.time, c_s, c_r, step, rec.cell,
           "accesses " + std::to_string(to_ps(rec.time - rec.previous_access)) + " ps apart");
  }
  if (rec.violation) {
    report(sender ? ViolationKind::P2Overflow : ViolationKind::P1Underrun, rec.time, c_s, c_r, step, rec.cell,
           sender ? "sender wrote a valid cell" : "receiver read an invalid cell");
  }
  if (sender) {
    ++snd_accesses_;
    last_write_[idx] = rec.time;
  } else {
    ++rcv_accesses_;
    if (last_write_[idx] != Femtos::min()) {
      latency_max_ps_ = std::max(latency_max_ps_, to_ps(rec.time - last_write_[idx] + cfg_.tau_r));
    }
  }
}

void LinkMonitor::check_bounds(Femtos t, double c_s, double c_r, std::uint64_t step) {
  const double diff = c_s - c_r;
  const double fill = half_n_ + diff;
  if (std::abs(diff) > cfg_.lemma_bound + 1e-9) {
    report(ViolationKind::Lemma1Bound, t, c_s, c_r, step, -1,
           "|c_s - c_r| = " + std::to_string(std::abs(diff)) + " exceeds " + std::to_string(cfg_.lemma_bound));
    return;
  }
  const double margin = cfg_.f_plus * cfg_.max_tau_ps;
  const double gap = std::abs(fill);
  if (gap < margin - 1e-9 || gap > static_cast<double>(cfg_.n) - margin + 1e-9) {
    report(ViolationKind::Lemma1Bound, t, c_s, c_r, step, -1,
           "pointer separation " + std::to_string(gap) + " outside [" + std::to_string(margin) + ", " +
               std::to_string(static_cast<double>(cfg_.n) - margin) + "]");
  }
}

void LinkMonitor::report_l1(Femtos t, double c_s, double c_r, std::uint64_t step, ControllerOutputs want) {
  report(ViolationKind::L1Conformance, t, c_s, c_r, step, -1,
         "forced (md_snd, md_rcv) = (" + std::string(to_string(want.md_snd)) + ", " +
             std::string(to_string(want.md_rcv)) + ")");
}

std::optional<Femtos> LinkMonitor::next_obligation(Femtos now) const {
  std::optional<Femtos> best;
  for (const auto& since : {l1_.sender_ahead_since(), l1_.receiver_ahead_since()}) {
    if (since && *since + cfg_.t_ctr > now && (!best || *since + cfg_.t_ctr < *best)) best = *since + cfg_.t_ctr;
  }
  return best;
}

std::uint64_t LinkMonitor::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

RunStats LinkMonitor::stats(double c_s0, double c_r0) const {
  RunStats s;
  const double elapsed_fs = static_cast<double>((last_t_ - t0_).count());
  s.elapsed_ns = elapsed_fs * 1e-6;
  s.cycles_completed = static_cast<std::int64_t>(std::floor(last_c_r_ - c_r0));
  s.max_abs_clock_diff = std::max(std::abs(diff_min_), std::abs(diff_max_));
  s.receiver_accesses = rcv_accesses_;
  s.sender_accesses = snd_accesses_;
  s.measured_latency_max = latency_max_ps_ * 1e-3;
  s.fill_min = half_n_ + diff_min_;
  s.fill_max = half_n_ + diff_max_;
  if (elapsed_fs > 0.0) {
    s.fraction_time_md_M = m_time_fs_ / elapsed_fs;
    s.measured_throughput = static_cast<double>(rcv_accesses_) / s.elapsed_ns;
    s.avg_frequency_snd_ghz = (last_c_s_ - c_s0) / s.elapsed_ns;
    s.avg_frequency_rcv_ghz = (last_c_r_ - c_r0) / s.elapsed_ns;
    s.fill_mean = fill_area_ / elapsed_fs;
  } else {
    s.fill_mean = last_fill_;
  }
  return s;
}

}  // namespace mclink

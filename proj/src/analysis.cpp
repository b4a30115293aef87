#include "mclink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mclink {

void LinkParams::validate() const {
  band.validate();
  if (t_osc < Femtos::zero() || tau_s < Femtos::zero() || tau_r < Femtos::zero() || tau_max < Femtos::zero()) {
    throw std::invalid_argument("durations must be >= 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ring size must be even and >= 2, got " + std::to_string(n));
}

std::string_view to_string(ViolatedSide s) {
  switch (s) {
    case ViolatedSide::Lower: return "lower";
    case ViolatedSide::Upper: return "upper";
    case ViolatedSide::None: break;
  }
  return "none";
}

double snap_to_integer(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kSnapTolerance * std::max(1.0, std::abs(x)) ? r : x;
}

double t_ctr_ps(const LinkParams& p) { return 1.0 / p.band.s_minus + to_ps(p.tau_max); }

double drift_budget(const LinkParams& p) {
  const double fp = p.band.f_plus;
  return (fp - p.band.s_minus) * (to_ps(p.t_osc) + t_ctr_ps(p)) + fp * to_ps(std::max(p.tau_s, p.tau_r));
}

double threshold_floor(const LinkParams& p) { return std::max(p.delta, p.band.f_plus * to_ps(p.tau_s) / 2.0); }

double delta_inner(const LinkParams& p) { return drift_budget(p) + threshold_floor(p); }

std::int64_t compute_delta(const LinkParams& p) {
  return static_cast<std::int64_t>(std::ceil(snap_to_integer(delta_inner(p))));
}

std::int64_t n_min(const LinkParams& p) { return std::max<std::int64_t>(2, 2 * compute_delta(p)); }

Interval feasible_threshold_range(const LinkParams& p, std::int64_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ring size must be even and >= 2, got " + std::to_string(n));
  Interval r;
  r.lo = threshold_floor(p);
  r.hi = static_cast<double>(n) / 2.0 - drift_budget(p);
  // Same snapping as compute_delta so emptiness matches n >= 2 Delta.
  const double half = static_cast<double>(n / 2);
  r.empty = snap_to_integer(delta_inner(p)) > half;
  return r;
}

LatencyThroughput latency_throughput(const LinkParams& p, std::int64_t n) {
  if (feasible_threshold_range(p, n).empty) {
    throw std::domain_error("no feasible threshold for ring size " + std::to_string(n));
  }
  return {static_cast<double>(n) / p.band.s_minus / 1e3, p.band.s_minus * 1e3};
}

double max_frequency_error(double nominal_slow_ghz, double nominal_fast_ghz) {
  if (!(nominal_slow_ghz > 0.0 && nominal_fast_ghz > nominal_slow_ghz)) {
    throw std::domain_error("max_frequency_error needs fast > slow > 0");
  }
  const double q = std::sqrt(nominal_fast_ghz / nominal_slow_ghz);
  return (q - 1.0) / (q + 1.0);
}

DerivedBounds derive_bounds(const LinkParams& p) {
  DerivedBounds b;
  b.t_ctr_ps = t_ctr_ps(p);
  b.delta_inner = delta_inner(p);
  b.delta_cap = compute_delta(p);
  b.n_min = n_min(p);
  b.t_range = feasible_threshold_range(p, p.n);
  b.feasible = !b.t_range.empty;
  if (b.t_range.empty) {
    b.violated = ViolatedSide::Upper;
  } else if (p.threshold) {
    if (*p.threshold < b.t_range.lo) {
      b.violated = ViolatedSide::Lower;
      b.feasible = false;
    } else if (*p.threshold > b.t_range.hi) {
      b.violated = ViolatedSide::Upper;
      b.feasible = false;
    }
  }
  b.latency_ns = static_cast<double>(p.n) / p.band.s_minus / 1e3;
  b.throughput_pkt_per_ns = p.band.s_minus * 1e3;
  return b;
}

}  // namespace mclink

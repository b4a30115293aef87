#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mclink/oscillator.hpp"
#include "mclink/units.hpp"

namespace mclink {

/// Model constants of one link. Durations are wall-clock, thresholds and
/// delta are in cycles; a duration times a rate (cycles/ps) gives cycles.
struct LinkParams {
  RateBand band{};
  Femtos t_osc{};
  Femtos tau_s{};
  Femtos tau_r{};
  Femtos tau_max{};
  /// Bound on the initial clock offset |c_s(0) - c_r(0)|.
  double delta = 0.0;
  std::int64_t n = 2;
  std::optional<double> threshold;

  /// Throws std::invalid_argument on an invalid band, negative duration,
  /// delta outside [0, 1] or an odd/nonpositive ring size.
  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;

  bool contains(double x) const { return !empty && x >= lo && x <= hi; }
};

enum class ViolatedSide { None, Lower, Upper };
std::string_view to_string(ViolatedSide s);

struct DerivedBounds {
  double t_ctr_ps = 0.0;
  double delta_inner = 0.0;
  std::int64_t delta_cap = 0;
  std::int64_t n_min = 2;
  Interval t_range{};
  bool feasible = false;
  ViolatedSide violated = ViolatedSide::None;
  double latency_ns = 0.0;
  double throughput_pkt_per_ns = 0.0;
};

/// Relative tolerance under which a double is treated as the nearby integer
/// before taking a ceiling, so 0.3 + 0.7 does not become 2.
inline constexpr double kSnapTolerance = 1e-12;
double snap_to_integer(double x);

/// 1/s- + tau_max, in ps.
double t_ctr_ps(const LinkParams& p);
/// Drift budget (f+ - s-)(T_osc + T_ctr) + f+ max(tau_s, tau_r), cycles.
double drift_budget(const LinkParams& p);
/// max(delta, f+ tau_s / 2), cycles.
double threshold_floor(const LinkParams& p);
/// Value under the ceiling in the definition of Delta.
double delta_inner(const LinkParams& p);
std::int64_t compute_delta(const LinkParams& p);
/// max(2, 2 Delta).
std::int64_t n_min(const LinkParams& p);

/// [max(delta, f+ tau_s/2), n/2 - drift_budget]. Throws on odd or
/// nonpositive n.
Interval feasible_threshold_range(const LinkParams& p, std::int64_t n);

struct LatencyThroughput {
  double latency_ns;
  double throughput_pkt_per_ns;
};
/// (n / s-, s-). Throws std::domain_error if the range for n is empty.
LatencyThroughput latency_throughput(const LinkParams& p, std::int64_t n);

/// Largest r with (1+r)^2/(1-r)^2 <= fast/slow. Throws std::domain_error
/// unless fast > slow > 0.
double max_frequency_error(double nominal_slow_ghz, double nominal_fast_ghz);

DerivedBounds derive_bounds(const LinkParams& p);

}  // namespace mclink

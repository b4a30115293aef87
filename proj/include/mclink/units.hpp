#pragma once

#include <chrono>
#include <cstdint>

namespace mclink {

/// Simulation timeline unit. All engine timestamps are integer femtoseconds
/// measured from the start of the run.
using Femtos = std::chrono::duration<std::int64_t, std::femto>;
using Picos = std::chrono::duration<double, std::pico>;

constexpr Femtos from_ps(double ps) { return std::chrono::round<Femtos>(Picos{ps}); }
constexpr double to_ps(Femtos t) { return Picos{t}.count(); }
constexpr double to_ns(Femtos t) { return Picos{t}.count() * 1e-3; }

// Rates are kept in cycles per picosecond internally; configs speak GHz.
constexpr double ghz_to_cpps(double ghz) { return ghz * 1e-3; }
constexpr double cpps_to_ghz(double cycles_per_ps) { return cycles_per_ps * 1e3; }

}  // namespace mclink

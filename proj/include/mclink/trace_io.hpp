#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mclink/sim_engine.hpp"

namespace mclink {

enum class TraceFormat { Csv, Vcd };

/// Header: time_ps,clk_snd,clk_rcv,c_s_cycles,c_r_cycles,md_snd,md_rcv,
/// F_0..F_{n-1},fill,p_offset. Ternary columns use 0/1/x; a clock is 1
/// while frac(c) < 1/2.
void write_trace_csv(const Trace& trace, std::ostream& out);
/// 1-bit wires for clocks, modes and flags (M as x) plus real variables
/// for the clocks, fill and pointer offset. Timescale 1 fs.
void write_trace_vcd(const Trace& trace, std::ostream& out);
/// Throws std::runtime_error on I/O failure.
void export_trace(const Trace& trace, TraceFormat format, const std::filesystem::path& path);

/// offset_ps,stabilization_time_ns,final_gap_cycles,violations
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
/// offset_ps,time_ps,fill
void write_sweep_curves_csv(const std::vector<SweepRow>& rows, std::ostream& out, std::size_t max_points_per_curve);

}  // namespace mclink

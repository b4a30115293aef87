#include "mclink/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mclink {

namespace {

char clock_level(double c) { return c - std::floor(c) < 0.5 ? '1' : '0'; }

std::string num(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string time_ps(Femtos t) { return num("%.3f", to_ps(t)); }

// VCD identifiers: printable ASCII from '!' on, base 94.
std::string vcd_id(std::size_t i) {
  std::string id;
  do {
    id.push_back(static_cast<char>('!' + i % 94));
    i /= 94;
  } while (i > 0);
  return id;
}

}  // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "time_ps,clk_snd,clk_rcv,c_s_cycles,c_r_cycles,md_snd,md_rcv";
  for (std::int64_t i = 0; i < trace.n; ++i) out << ",F_" << i;
  out << ",fill,p_offset\n";
  const auto n = static_cast<std::size_t>(trace.n);
  const double half = static_cast<double>(trace.n) / 2.0;
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    const double cs = trace.c_s[r];
    const double cr = trace.c_r[r];
    out << time_ps(trace.time[r]) << ',' << clock_level(cs) << ',' << clock_level(cr) << ',' << num("%.9f", cs)
        << ',' << num("%.9f", cr) << ',' << to_char(trace.md[r].md_snd) << ',' << to_char(trace.md[r].md_rcv);
    for (std::size_t i = 0; i < n; ++i) out << ',' << to_char(trace.flags[r * n + i]);
    out << ',' << num("%.9f", half + cs - cr) << ',' << num("%.9f", cs - cr) << '\n';
  }
}

void write_trace_vcd(const Trace& trace, std::ostream& out) {
  const auto n = static_cast<std::size_t>(trace.n);
  // Wires: clk_snd, clk_rcv, md_snd, md_rcv, F_0..F_{n-1}; then reals.
  std::vector<std::string> wire_names = {"clk_snd", "clk_rcv", "md_snd", "md_rcv"};
  for (std::size_t i = 0; i < n; ++i) wire_names.push_back("F_" + std::to_string(i));
  const std::vector<std::string> real_names = {"c_s_cycles", "c_r_cycles", "fill", "p_offset"};

  out << "$timescale 1 fs $end\n$scope module link $end\n";
  for (std::size_t i = 0; i < wire_names.size(); ++i) {
    out << "$var wire 1 " << vcd_id(i) << ' ' << wire_names[i] << " $end\n";
  }
  for (std::size_t i = 0; i < real_names.size(); ++i) {
    out << "$var real 64 " << vcd_id(wire_names.size() + i) << ' ' << real_names[i] << " $end\n";
  }
  out << "$upscope $end\n$enddefinitions $end\n";

  std::vector<char> last_wire(wire_names.size(), '?');
  std::vector<double> last_real(real_names.size(), std::nan(""));
  const double half = static_cast<double>(trace.n) / 2.0;
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    const double cs = trace.c_s[r];
    const double cr = trace.c_r[r];
    std::vector<char> wires = {clock_level(cs), clock_level(cr), to_char(trace.md[r].md_snd),
                               to_char(trace.md[r].md_rcv)};
    for (std::size_t i = 0; i < n; ++i) wires.push_back(to_char(trace.flags[r * n + i]));
    const double reals[] = {cs, cr, half + cs - cr, cs - cr};

    std::string body;
    for (std::size_t i = 0; i < wires.size(); ++i) {
      if (wires[i] == last_wire[i]) continue;
      last_wire[i] = wires[i];
      body += wires[i];
      body += vcd_id(i);
      body += '\n';
    }
    for (std::size_t i = 0; i < real_names.size(); ++i) {
      if (reals[i] == last_real[i]) continue;
      last_real[i] = reals[i];
      body += 'r' + num("%.9g", reals[i]) + ' ' + vcd_id(wire_names.size() + i) + '\n';
    }
    if (body.empty()) continue;
    out << '#' << trace.time[r].count() << '\n' << body;
  }
}

void export_trace(const Trace& trace, TraceFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (format == TraceFormat::Csv) {
    write_trace_csv(trace, out);
  } else {
    write_trace_vcd(trace, out);
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "offset_ps,stabilization_time_ns,final_gap_cycles,violations\n";
  for (const SweepRow& r : rows) {
    out << num("%.3f", r.offset_ps) << ','
        << (r.stabilized ? num("%.6f", r.stabilization_time_ns) : std::string("nan")) << ','
        << num("%.6f", r.final_gap_cycles) << ',' << r.violations << '\n';
  }
}

void write_sweep_curves_csv(const std::vector<SweepRow>& rows, std::ostream& out, std::size_t max_points_per_curve) {
  out << "offset_ps,time_ps,fill\n";
  for (const SweepRow& r : rows) {
    const std::size_t stride =
        max_points_per_curve == 0 ? 1 : std::max<std::size_t>(1, r.curve.size() / max_points_per_curve);
    for (std::size_t i = 0; i < r.curve.size(); i += stride) {
      out << num("%.3f", r.offset_ps) << ',' << time_ps(r.curve[i].time) << ',' << num("%.9f", r.curve[i].fill)
          << '\n';
    }
  }
}

}  // namespace mclink

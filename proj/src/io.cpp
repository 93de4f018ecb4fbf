#include "nfadsim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nfadsim {

std::string format_double(double value) {
  char buf[40];
  // Shortest decimal form that parses back to the same double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void write_clicks_csv(const DetectorRun& run, std::ostream& out) {
  out << "t_s,cause,amplitude_v\n";
  for (const auto& c : run.clicks) {
    out << format_double(c.t) << ',' << to_string(c.cause) << ','
        << format_double(c.amplitude) << '\n';
  }
}

void write_current_csv(const DetectorRun& run, std::ostream& out) {
  out << "t_start_s,t_end_s,current_a\n";
  for (const auto& s : run.current_trace) {
    out << format_double(s.t_start) << ',' << format_double(s.t_end) << ','
        << format_double(s.current) << '\n';
  }
}

void write_trace_csv(const MonitorTrace& trace, std::ostream& out) {
  out << (trace.kind == TraceKind::MeanCurrent ? "t_s,current_a\n"
                                               : "t_s,voltage_deviation_v\n");
  for (const auto& s : trace.samples) {
    out << format_double(s.t) << ',' << format_double(s.value) << '\n';
  }
}

void write_alarms_csv(const AlarmReport& report, std::ostream& out) {
  out << "t_start_s,t_end_s,kind,peak_deviation\n";
  for (const auto& a : report.alarms) {
    out << format_double(a.t_start) << ',' << format_double(a.t_end) << ','
        << to_string(a.kind) << ',' << format_double(a.peak_deviation) << '\n';
  }
}

} // namespace nfadsim

#pragma once

#include "nfadsim/detector.hpp"
#include "nfadsim/monitor.hpp"

#include <ostream>
#include <string>

namespace nfadsim {

/// Deterministic number formatting shared by every CSV/manifest writer:
/// shortest representation that round-trips a double ("%.17g" fallback).
std::string format_double(double value);

/// Click record export: header "t_s,cause,amplitude_v".
void write_clicks_csv(const DetectorRun& run, std::ostream& out);

/// Current trace export: header "t_start_s,t_end_s,current_a".
void write_current_csv(const DetectorRun& run, std::ostream& out);

/// Monitor trace export: header "t_s,value".
void write_trace_csv(const MonitorTrace& trace, std::ostream& out);

/// Alarm list export: header "t_start_s,t_end_s,kind,peak_deviation".
void write_alarms_csv(const AlarmReport& report, std::ostream& out);

} // namespace nfadsim

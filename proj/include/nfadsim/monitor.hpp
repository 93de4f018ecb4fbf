#pragma once

#include "nfadsim/detector.hpp"

#include <string>
#include <vector>

namespace nfadsim {

enum class TraceKind { MeanCurrent, BiasVoltage };
enum class Verdict { Clean, BlindingSuspected };

std::string to_string(TraceKind kind);
std::string to_string(Verdict verdict);

struct MonitorConfig {
  // slow mean-current channel
  double sampling_period = 1.0; ///< s
  double mirror_ratio = 0.20;   ///< current mirror gain
  int adc_bits = 24;
  double adc_full_scale = 1e-5; ///< A at the mirror output

  // fast bias-voltage channel
  double z_out = 1e3;          ///< bias source output impedance, ohms
  double filter_tau = 100e-9;  ///< first-order low-pass time constant, s
  double sample_dt = 25e-9;    ///< probe sampling step, s
  double transient_amplitude = 0.05; ///< quench transient peak, V
  double transient_sigma = 50e-9;    ///< quench transient width, s
};

struct TraceSample {
  double t = 0.0;
  double value = 0.0; ///< A for MeanCurrent, V (deviation) for BiasVoltage
};

struct MonitorTrace {
  TraceKind kind = TraceKind::MeanCurrent;
  std::vector<TraceSample> samples;
  MonitorConfig config;
  std::vector<double> quench_marks; ///< deadtime start/end instants
  std::vector<double> click_times;
};

struct Alarm {
  double t_start = 0.0;
  double t_end = 0.0;
  TraceKind kind = TraceKind::MeanCurrent;
  double peak_deviation = 0.0; ///< A or V depending on kind
};

struct AlarmReport {
  std::vector<Alarm> alarms;
  double threshold = 0.0;
  Verdict verdict = Verdict::Clean;
  std::vector<double> compromised_clicks; ///< clicks preceded by flagged blinding

  std::string summary() const; ///< line-oriented text for CLI display
};

/// Slow countermeasure: integrates the supply current over each sampling
/// window, applies the mirror ratio and ADC quantization, and flags windows
/// whose APD-referred mean exceeds threshold. Throws std::invalid_argument
/// if the run is shorter than one window.
AlarmReport mean_current_monitor(const DetectorRun& run, double threshold,
                                 const MonitorConfig& config = {});

/// The windowed samples behind mean_current_monitor (APD-referred amperes).
MonitorTrace mean_current_trace(const DetectorRun& run,
                                const MonitorConfig& config = {});

/// Fast countermeasure input: deviation of the bias source output,
/// dV(t) = -I_supply(t) * z_out, through a first-order low-pass, plus a
/// bipolar transient pair at each deadtime start/end. Optional [t_start,
/// t_end) window restricts the traced span (t_end < 0 means full run).
MonitorTrace bias_voltage_trace(const DetectorRun& run,
                                const MonitorConfig& config = {},
                                double t_start = 0.0, double t_end = -1.0);

/// Flags intervals where the bias deviation stays below -drop_threshold for
/// at least min_duration, masking a guard window around the known quench
/// transients. Clicks immediately preceded by a flagged interval are
/// reported as potentially compromised. Requires a BiasVoltage trace.
AlarmReport fast_blinding_detector(const MonitorTrace& trace,
                                   double drop_threshold,
                                   double min_duration);

} // namespace nfadsim

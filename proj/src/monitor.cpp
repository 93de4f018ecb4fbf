#include "nfadsim/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nfadsim {

std::string to_string(TraceKind kind) {
  return kind == TraceKind::MeanCurrent ? "mean_current" : "bias_voltage";
}

std::string to_string(Verdict verdict) {
  return verdict == Verdict::Clean ? "clean" : "blinding_suspected";
}

std::string AlarmReport::summary() const {
  std::ostringstream os;
  os << "verdict: " << to_string(verdict) << "\n";
  os << "threshold: " << threshold << "\n";
  os << "alarms: " << alarms.size() << "\n";
  for (const auto& a : alarms) {
    os << "  [" << a.t_start << ", " << a.t_end
       << "] peak_deviation=" << a.peak_deviation << "\n";
  }
  if (!compromised_clicks.empty()) {
    os << "compromised clicks: " << compromised_clicks.size() << "\n";
  }
  return os.str();
}

namespace {

// Integral of the piecewise-constant trace over [a, b).
double integrate_current(const DetectorRun& run, double a, double b) {
  double q = 0.0;
  for (const auto& seg : run.current_trace) {
    const double lo = std::max(a, seg.t_start);
    const double hi = std::min(b, seg.t_end);
    if (hi > lo) q += seg.current * (hi - lo);
    if (seg.t_start >= b) break;
  }
  return q;
}

} // namespace

MonitorTrace mean_current_trace(const DetectorRun& run,
                                const MonitorConfig& config) {
  if (!(config.sampling_period > 0.0)) {
    throw std::invalid_argument("mean_current_trace: sampling period must be > 0");
  }
  const long n_windows =
      static_cast<long>(run.duration() / config.sampling_period + 1e-9);
  if (n_windows < 1) {
    throw std::invalid_argument(
        "mean_current_trace: run shorter than one sampling window");
  }
  const double lsb =
      config.adc_full_scale / std::pow(2.0, config.adc_bits);
  MonitorTrace trace;
  trace.kind = TraceKind::MeanCurrent;
  trace.config = config;
  trace.samples.reserve(static_cast<std::size_t>(n_windows));
  for (long k = 0; k < n_windows; ++k) {
    const double a = k * config.sampling_period;
    const double b = a + config.sampling_period;
    const double mean = integrate_current(run, a, b) / config.sampling_period;
    const double mirrored = mean * config.mirror_ratio;
    const double quantized = std::round(mirrored / lsb) * lsb;
    trace.samples.push_back({a, quantized / config.mirror_ratio});
  }
  for (const auto& c : run.clicks) trace.click_times.push_back(c.t);
  return trace;
}

AlarmReport mean_current_monitor(const DetectorRun& run, double threshold,
                                 const MonitorConfig& config) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("mean_current_monitor: threshold must be > 0");
  }
  const MonitorTrace trace = mean_current_trace(run, config);
  AlarmReport report;
  report.threshold = threshold;
  const double period = config.sampling_period;
  for (const auto& s : trace.samples) {
    if (s.value <= threshold) continue;
    if (!report.alarms.empty() &&
        std::abs(report.alarms.back().t_end - s.t) < 0.5 * period) {
      report.alarms.back().t_end = s.t + period;
      report.alarms.back().peak_deviation =
          std::max(report.alarms.back().peak_deviation, s.value);
    } else {
      report.alarms.push_back({s.t, s.t + period, TraceKind::MeanCurrent, s.value});
    }
  }
  report.verdict =
      report.alarms.empty() ? Verdict::Clean : Verdict::BlindingSuspected;
  return report;
}

MonitorTrace bias_voltage_trace(const DetectorRun& run,
                                const MonitorConfig& config, double t_start,
                                double t_end) {
  if (t_end < 0.0) t_end = run.duration();
  t_start = std::max(0.0, t_start);
  t_end = std::min(run.duration(), t_end);
  if (!(t_end > t_start) || !(config.sample_dt > 0.0)) {
    throw std::invalid_argument("bias_voltage_trace: empty sampling window");
  }
  const double dt = config.sample_dt;
  const std::size_t n = static_cast<std::size_t>((t_end - t_start) / dt) + 1;

  MonitorTrace trace;
  trace.kind = TraceKind::BiasVoltage;
  trace.config = config;
  trace.samples.resize(n);

  // Supply-current drop through the source impedance, low-passed.
  const double alpha = 1.0 - std::exp(-dt / config.filter_tau);
  std::size_t seg_i = 0;
  const auto& segs = run.current_trace;
  auto current_at = [&](double t) {
    if (segs.empty()) return 0.0;
    while (seg_i + 1 < segs.size() && segs[seg_i].t_end <= t) ++seg_i;
    return segs[seg_i].current; // the trace tiles [0, duration]
  };
  double y = -current_at(t_start) * config.z_out;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_start + i * dt;
    const double x = -current_at(t) * config.z_out;
    y += (x - y) * alpha;
    trace.samples[i] = {t, y};
  }

  // Bipolar quench transients at each deadtime start/end.
  for (const auto& c : run.clicks) {
    trace.click_times.push_back(c.t);
    const double marks[2] = {c.t, c.t + run.params.tau_d};
    const double signs[2] = {+1.0, -1.0};
    for (int k = 0; k < 2; ++k) {
      const double m = marks[k];
      if (m < t_start - 6.0 * config.transient_sigma ||
          m > t_end + 6.0 * config.transient_sigma) {
        continue;
      }
      trace.quench_marks.push_back(m);
      const double lo = m - 5.0 * config.transient_sigma;
      const double hi = m + 5.0 * config.transient_sigma;
      const long i0 = std::max<long>(0, static_cast<long>((lo - t_start) / dt));
      const long i1 = std::min<long>(static_cast<long>(n) - 1,
                                     static_cast<long>((hi - t_start) / dt) + 1);
      for (long i = i0; i <= i1; ++i) {
        const double d = (t_start + i * dt - m) / config.transient_sigma;
        trace.samples[static_cast<std::size_t>(i)].value +=
            signs[k] * config.transient_amplitude * std::exp(-0.5 * d * d);
      }
    }
  }
  return trace;
}

AlarmReport fast_blinding_detector(const MonitorTrace& trace,
                                   double drop_threshold,
                                   double min_duration) {
  if (trace.kind != TraceKind::BiasVoltage) {
    throw std::invalid_argument(
        "fast_blinding_detector: needs a bias-voltage trace");
  }
  if (!(drop_threshold > 0.0) || !(min_duration > 0.0)) {
    throw std::invalid_argument(
        "fast_blinding_detector: thresholds must be positive");
  }
  AlarmReport report;
  report.threshold = drop_threshold;
  if (trace.samples.empty()) return report;

  // Guard mask around the known quench transients.
  const double guard = 3.0 * trace.config.filter_tau;
  std::vector<std::pair<double, double>> guards;
  guards.reserve(trace.quench_marks.size());
  for (double m : trace.quench_marks) guards.push_back({m - guard, m + guard});
  std::sort(guards.begin(), guards.end());
  std::size_t g_i = 0;
  auto guarded = [&](double t) {
    while (g_i < guards.size() && guards[g_i].second < t) ++g_i;
    return g_i < guards.size() && guards[g_i].first <= t && t <= guards[g_i].second;
  };

  bool in_run = false;
  double run_start = 0.0, run_peak = 0.0, run_last = 0.0;
  auto close_run = [&](double t_close) {
    if (in_run && run_last - run_start >= min_duration) {
      report.alarms.push_back(
          {run_start, t_close, TraceKind::BiasVoltage, run_peak});
    }
    in_run = false;
  };
  for (const auto& s : trace.samples) {
    const bool below = s.value < -drop_threshold && !guarded(s.t);
    if (below) {
      if (!in_run) {
        in_run = true;
        run_start = s.t;
        run_peak = 0.0;
      }
      run_last = s.t;
      run_peak = std::max(run_peak, -s.value);
    } else {
      close_run(s.t);
    }
  }
  close_run(trace.samples.back().t);

  // Forced clicks immediately preceded by a flagged interval were controlled
  // by Eve; report them so Bob knows which bits to discard.
  constexpr double kLookback = 5e-6;
  std::size_t a_i = 0;
  for (double tc : trace.click_times) {
    while (a_i < report.alarms.size() && report.alarms[a_i].t_end < tc - kLookback) {
      ++a_i;
    }
    if (a_i < report.alarms.size() && report.alarms[a_i].t_start <= tc) {
      report.compromised_clicks.push_back(tc);
    }
  }
  report.verdict =
      report.alarms.empty() ? Verdict::Clean : Verdict::BlindingSuspected;
  return report;
}

} // namespace nfadsim

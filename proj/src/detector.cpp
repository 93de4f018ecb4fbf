#include "nfadsim/detector.hpp"

#include "nfadsim/rng.hpp"
#include "nfadsim/stats.hpp"
#include "nfadsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nfadsim {

std::string to_string(ClickCause cause) {
  switch (cause) {
    case ClickCause::Photon: return "photon";
    case ClickCause::FakedState: return "faked";
    case ClickCause::Dark: return "dark";
  }
  return "?";
}

double DetectorRun::mean_current() const {
  double q = 0.0;
  for (const auto& seg : current_trace) {
    q += seg.current * (seg.t_end - seg.t_start);
  }
  return duration() > 0.0 ? q / duration() : 0.0;
}

double DetectorRun::current_at(double t) const {
  auto it = std::upper_bound(
      current_trace.begin(), current_trace.end(), t,
      [](double v, const CurrentSegment& s) { return v < s.t_start; });
  if (it == current_trace.begin()) return 0.0;
  --it;
  return (t < it->t_end || it + 1 == current_trace.end()) ? it->current : 0.0;
}

double pulse_amplitude(double e_pulse, double gain, const NfadParams& params) {
  const double primary_charge = e_pulse / kPhotonEnergy1550 * kElectronCharge;
  return params.amp_transimpedance * primary_charge * gain;
}

double click_probability(double e_pulse, const OperatingPoint& op,
                         const NfadParams& params) {
  if (op.mode != ApdMode::Linear) {
    throw std::invalid_argument(
        "click_probability: operating point must be linear-mode (blinded); "
        "the single-photon path owns Geiger mode");
  }
  if (!(e_pulse >= 0.0)) {
    throw std::invalid_argument("click_probability: e_pulse must be >= 0");
  }
  const double a = pulse_amplitude(e_pulse, op.gain, params);
  return normal_cdf((a - params.v_th) / params.noise_sigma);
}

namespace {

struct PowerSeg {
  double a, b, power;
};

// CW timeline plus the mean-field power of the Poisson photon flux, tiling
// [0, duration].
std::vector<PowerSeg> build_power_segments(const OpticalScenario& sc) {
  const double base = sc.photon_rate * kPhotonEnergy1550;
  std::vector<PowerSeg> segs;
  double t = 0.0;
  for (const auto& cw : sc.cw) {
    if (cw.t_start > t) segs.push_back({t, cw.t_start, base});
    segs.push_back({cw.t_start, cw.t_end, base + cw.power});
    t = cw.t_end;
  }
  if (t < sc.duration) segs.push_back({t, sc.duration, base});
  return segs;
}

// Tiny memo: a run only ever visits a handful of (power, quenched) pairs.
class OpCache {
public:
  explicit OpCache(const NfadParams& params) : params_(params) {}

  const OperatingPoint& at(double power, bool quenched) {
    for (const auto& e : entries_) {
      if (e.power == power && e.quenched == quenched) return e.op;
    }
    entries_.push_back({power, quenched,
                        solve_operating_point(power, params_, quenched)});
    return entries_.back().op;
  }

private:
  struct Entry {
    double power;
    bool quenched;
    OperatingPoint op;
  };
  const NfadParams& params_;
  std::vector<Entry> entries_;
};

struct Deadtime {
  double t_start, t_end;
  double charge; // drawn from the supply across this window
};

} // namespace

DetectorRun simulate(const OpticalScenario& scenario, const NfadParams& params,
                     std::uint64_t seed) {
  params.validate();
  DetectorRun run;
  run.params = params;
  run.scenario = scenario;
  run.scenario.validate_and_normalize();
  run.rng_seed = seed;
  const OpticalScenario& sc = run.scenario;

  auto rng = make_rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double tau = params.tau_d;
  const double sigma_sp = fwhm_to_sigma(params.sp_jitter_fwhm);
  const double inf = std::numeric_limits<double>::infinity();

  OpCache ops(params);
  const auto segs = build_power_segments(sc);

  std::vector<Deadtime> deadtimes;
  double t_free = 0.0;
  double prev_reg = -inf;

  auto register_click = [&](double t_event, ClickCause cause, double jitter_sigma,
                            double amplitude, double charge) {
    double t_reg = t_event;
    if (jitter_sigma > 0.0) t_reg += jitter_sigma * unit_normal(rng);
    // The hold-off circuit cannot re-arm early; clamp to the deadtime edge.
    if (t_reg < prev_reg + tau) t_reg = prev_reg + tau;
    if (t_reg < 0.0) t_reg = 0.0;
    run.clicks.push_back({t_reg, cause, amplitude});
    deadtimes.push_back({t_reg, t_reg + tau, charge});
    prev_reg = t_reg;
    t_free = t_reg + tau;
  };

  std::size_t pulse_idx = 0;
  for (std::size_t si = 0; si < segs.size(); ++si) {
    const auto& seg = segs[si];
    const bool last = si + 1 == segs.size();
    auto pulse_in_segment = [&](double tp) {
      return last ? tp <= seg.b : tp < seg.b;
    };

    const OperatingPoint& op_u = ops.at(seg.power, false);
    if (op_u.mode == ApdMode::Linear) {
      // Blinded: single photons and dark counts cannot click; only trigger
      // pulses outside a deadtime can force a detection.
      while (pulse_idx < sc.pulses.size() &&
             pulse_in_segment(sc.pulses[pulse_idx].t_peak)) {
        const TriggerPulse& p = sc.pulses[pulse_idx];
        ++pulse_idx;
        if (p.t_peak < t_free) continue; // suppressed inside deadtime
        const double a = pulse_amplitude(p.energy, op_u.gain, params) +
                         params.noise_sigma * unit_normal(rng);
        if (a > params.v_th) {
          const double fs_fwhm = std::hypot(p.fwhm, params.electronics_jitter_fwhm);
          register_click(p.t_peak, ClickCause::FakedState,
                         fwhm_to_sigma(fs_fwhm), a, 0.0);
        }
      }
      continue;
    }

    // Geiger mode. Click candidates (photon flux thinned by the efficiency,
    // plus dark counts) are drawn as exponential gaps from the running
    // cursor; anything landing inside a deadtime was never drawn because the
    // cursor restarts at t_free, which is valid by memorylessness.
    const double photon_click_rate = sc.photon_rate * params.efficiency;
    const double lambda = photon_click_rate + params.dark_count_rate;
    std::exponential_distribution<double> gap(lambda > 0.0 ? lambda : 1.0);
    double cursor = seg.a;
    while (true) {
      const double tp = pulse_idx < sc.pulses.size()
                            ? sc.pulses[pulse_idx].t_peak
                            : inf;
      const bool tp_here = tp != inf && pulse_in_segment(tp);
      double cand = inf;
      if (lambda > 0.0) cand = std::max(cursor, t_free) + gap(rng);
      if (tp_here && tp <= cand) {
        const TriggerPulse& p = sc.pulses[pulse_idx];
        ++pulse_idx;
        cursor = tp;
        if (tp < t_free) continue; // suppressed inside deadtime
        // A live Geiger detector sees the pulse as a packet of photons.
        const double n_mean = p.energy / kPhotonEnergy1550;
        const double p_click = 1.0 - std::exp(-n_mean * params.efficiency);
        if (unit(rng) < p_click) {
          register_click(tp, ClickCause::Photon, sigma_sp,
                         params.geiger_amplitude, params.avalanche_charge);
        }
        continue;
      }
      if (cand < seg.b) {
        const ClickCause cause = unit(rng) * lambda < photon_click_rate
                                     ? ClickCause::Photon
                                     : ClickCause::Dark;
        register_click(cand, cause, sigma_sp, params.geiger_amplitude,
                       params.avalanche_charge);
        cursor = cand;
        continue;
      }
      break;
    }
  }

  // Supply-current trace: DC operating point per (power, quench) interval,
  // plus the avalanche charge of Geiger clicks spread over their deadtime.
  std::vector<double> edges;
  edges.reserve(2 * deadtimes.size() + segs.size() + 1);
  for (const auto& s : segs) edges.push_back(s.a);
  edges.push_back(sc.duration);
  for (const auto& d : deadtimes) {
    if (d.t_start < sc.duration) edges.push_back(d.t_start);
    if (d.t_end < sc.duration) edges.push_back(d.t_end);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::size_t seg_i = 0, dead_i = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double x = edges[i];
    const double y = edges[i + 1];
    if (y <= x) continue;
    while (seg_i + 1 < segs.size() && segs[seg_i].b <= x) ++seg_i;
    while (dead_i < deadtimes.size() && deadtimes[dead_i].t_end <= x) ++dead_i;
    const bool quenched =
        dead_i < deadtimes.size() && deadtimes[dead_i].t_start <= x;
    double current = ops.at(segs[seg_i].power, quenched).i_apd;
    if (quenched && deadtimes[dead_i].charge > 0.0) {
      current += deadtimes[dead_i].charge / tau;
    }
    if (!run.current_trace.empty() &&
        run.current_trace.back().current == current) {
      run.current_trace.back().t_end = y; // merge equal neighbours
    } else {
      run.current_trace.push_back({x, y, current});
    }
  }
  return run;
}

std::vector<RatePoint> count_rate_curve(const std::vector<double>& photon_rates,
                                        const NfadParams& params,
                                        double duration, std::uint64_t seed) {
  std::vector<RatePoint> out;
  out.reserve(photon_rates.size());
  for (std::size_t i = 0; i < photon_rates.size(); ++i) {
    if (photon_rates[i] < 0.0) {
      throw std::invalid_argument("count_rate_curve: rates must be >= 0");
    }
    OpticalScenario sc;
    sc.photon_rate = photon_rates[i];
    sc.duration = duration;
    sc.rng_seed = splitmix64(seed ^ (i + 1));
    DetectorRun run = simulate(sc, params, sc.rng_seed);
    out.push_back({photon_rates[i],
                   static_cast<double>(run.clicks.size()) / duration,
                   run.mean_current()});
  }
  return out;
}

} // namespace nfadsim

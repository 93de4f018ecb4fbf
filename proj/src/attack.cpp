#include "nfadsim/attack.hpp"

#include "nfadsim/rng.hpp"
#include "nfadsim/stats.hpp"
#include "nfadsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nfadsim {

namespace {

constexpr double kWilsonZ = 1.959964;

// Time the blinding laser realistically keeps shining after a forced click
// before its switch-off completes. The trigger pulse itself needs light.
constexpr double kSwitchOffLatency = 1e-9;

void require_blinded(double p_blinding, const NfadParams& params) {
  if (solve_operating_point(p_blinding, params, false).mode != ApdMode::Linear) {
    throw std::invalid_argument(
        "attack: p_blinding does not blind the detector; the measurement "
        "would mix Geiger clicks");
  }
}

void require_trigger_rate(double trigger_rate, const NfadParams& params) {
  if (!(trigger_rate > 0.0) || trigger_rate >= 1.0 / params.tau_d) {
    throw std::invalid_argument(
        "attack: trigger rate must be positive and below 1/tau_d");
  }
}

OpticalScenario pulse_train_scenario(double p_blinding, double energy,
                                     double fwhm, long n_pulses,
                                     double trigger_rate, std::uint64_t seed) {
  OpticalScenario sc;
  const double period = 1.0 / trigger_rate;
  sc.duration = (static_cast<double>(n_pulses) + 1.0) * period;
  if (p_blinding > 0.0) sc.cw.push_back({0.0, sc.duration, p_blinding});
  sc.pulses.reserve(static_cast<std::size_t>(n_pulses));
  for (long k = 0; k < n_pulses; ++k) {
    sc.pulses.push_back({(static_cast<double>(k) + 1.0) * period, energy, fwhm});
  }
  sc.rng_seed = seed;
  return sc;
}

long count_cause(const DetectorRun& run, ClickCause cause) {
  long n = 0;
  for (const auto& c : run.clicks) n += (c.cause == cause);
  return n;
}

} // namespace

std::vector<ClickCurvePoint> estimate_click_curve(
    double p_blinding, const std::vector<double>& energies, long n_trials,
    const NfadParams& params, std::uint64_t seed, double trigger_rate) {
  params.validate();
  require_trigger_rate(trigger_rate, params);
  require_blinded(p_blinding, params);
  if (n_trials <= 0) {
    throw std::invalid_argument("estimate_click_curve: n_trials must be > 0");
  }
  std::vector<ClickCurvePoint> out;
  out.reserve(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const auto sc = pulse_train_scenario(p_blinding, energies[i], 33e-12,
                                         n_trials, trigger_rate,
                                         splitmix64(seed ^ (i + 1)));
    const DetectorRun run = simulate(sc, params, sc.rng_seed);
    const long k = count_cause(run, ClickCause::FakedState);
    const auto [lo, hi] = wilson_interval(k, n_trials, kWilsonZ);
    out.push_back({energies[i], static_cast<double>(k) / n_trials, lo, hi,
                   n_trials, k});
  }
  return out;
}

ThresholdEstimate estimate_thresholds(double p_blinding,
                                      const NfadParams& params, double epsilon,
                                      long n_trials, std::uint64_t seed,
                                      double trigger_rate) {
  params.validate();
  require_trigger_rate(trigger_rate, params);
  require_blinded(p_blinding, params);
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("estimate_thresholds: epsilon must lie in (0, 0.5)");
  }
  if (n_trials <= 0) {
    throw std::invalid_argument("estimate_thresholds: n_trials must be > 0");
  }
  // Even a zero-click probe cannot certify p <= epsilon when the sample is
  // too small; catch that before burning probes.
  if (wilson_interval(0, n_trials, kWilsonZ).second > epsilon) {
    throw std::invalid_argument(
        "estimate_thresholds: n_trials too small to certify the requested "
        "epsilon");
  }

  std::uint64_t probe_counter = 0;
  std::map<double, long> probed; // energy -> clicks
  auto clicks_at = [&](double energy) {
    auto it = probed.find(energy);
    if (it != probed.end()) return it->second;
    const auto sc = pulse_train_scenario(p_blinding, energy, 33e-12, n_trials,
                                         trigger_rate,
                                         splitmix64(seed ^ (++probe_counter)));
    const DetectorRun run = simulate(sc, params, sc.rng_seed);
    const long k = count_cause(run, ClickCause::FakedState);
    probed.emplace(energy, k);
    return k;
  };
  auto never_ok = [&](double energy) {
    return wilson_interval(clicks_at(energy), n_trials, kWilsonZ).second <= epsilon;
  };
  auto always_ok = [&](double energy) {
    return wilson_interval(clicks_at(energy), n_trials, kWilsonZ).first >=
           1.0 - epsilon;
  };

  // Geometric bracketing from a femtojoule anchor, then log-bisection.
  // bracket() returns lo/hi one growth step apart with pred(lo) false and
  // pred(hi) true; pred must be (statistically) monotone in energy.
  const double growth = 4.0;
  auto bracket = [&](auto&& pred, double start) {
    double hi = start;
    while (!pred(hi)) {
      hi *= growth;
      if (hi > 1.0) {
        throw std::runtime_error(
            "estimate_thresholds: bracketing ran past 1 J without a "
            "qualifying energy");
      }
    }
    double lo = hi / growth;
    while (pred(lo)) {
      hi = lo;
      lo /= growth;
      if (lo < 1e-24) {
        throw std::runtime_error(
            "estimate_thresholds: bracketing ran below 1e-24 J without a "
            "disqualifying energy");
      }
    }
    return std::pair<double, double>{lo, hi};
  };

  auto [e_always_lo, e_always_hi] = bracket(always_ok, 1e-15);
  auto not_never = [&](double e) { return !never_ok(e); };
  auto [e_never_lo, e_never_hi] = bracket(not_never, e_always_lo);

  const double rel_width = 1.01;
  while (e_always_hi / e_always_lo > rel_width) {
    const double mid = std::sqrt(e_always_lo * e_always_hi);
    (always_ok(mid) ? e_always_hi : e_always_lo) = mid;
  }
  while (e_never_hi / e_never_lo > rel_width) {
    const double mid = std::sqrt(e_never_lo * e_never_hi);
    (never_ok(mid) ? e_never_lo : e_never_hi) = mid;
  }
  return {e_never_lo, e_always_hi};
}

ThresholdMap build_threshold_map(const std::vector<double>& blinding_powers,
                                 const NfadParams& params, double epsilon,
                                 long n_trials, std::uint64_t seed,
                                 double trigger_rate) {
  ThresholdMap map;
  map.params = params;
  map.epsilon = epsilon;
  map.n_trials = n_trials;
  std::vector<double> powers = blinding_powers;
  std::sort(powers.begin(), powers.end());
  map.entries.reserve(powers.size());
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const auto est = estimate_thresholds(powers[i], params, epsilon, n_trials,
                                         splitmix64(seed ^ (0x7777 + i)),
                                         trigger_rate);
    if (est.e_never > est.e_always) {
      throw std::runtime_error("build_threshold_map: estimator returned "
                               "e_never > e_always");
    }
    map.entries.push_back({powers[i], est.e_never, est.e_always});
  }
  return map;
}

JitterResult jitter_experiment(double p_blinding, double e_pulse, long n_pulses,
                               const NfadParams& params, std::uint64_t seed,
                               JitterSource source, double pulse_fwhm,
                               double trigger_rate) {
  params.validate();
  require_trigger_rate(trigger_rate, params);
  if (n_pulses <= 0) {
    throw std::invalid_argument("jitter_experiment: n_pulses must be > 0");
  }
  ClickCause expected_cause = ClickCause::Photon;
  double cw = 0.0;
  if (source == JitterSource::FakedState) {
    require_blinded(p_blinding, params);
    expected_cause = ClickCause::FakedState;
    cw = p_blinding;
  }
  const auto sc =
      pulse_train_scenario(cw, e_pulse, pulse_fwhm, n_pulses, trigger_rate, seed);
  const DetectorRun run = simulate(sc, params, seed);

  // Pair each click with the nearest pulse peak; jitter is far below the
  // pulse period, so the nearest peak is always the causing one.
  std::vector<double> deltas;
  deltas.reserve(run.clicks.size());
  std::size_t pi = 0;
  for (const auto& c : run.clicks) {
    if (c.cause != expected_cause) continue;
    while (pi + 1 < sc.pulses.size() &&
           std::abs(sc.pulses[pi + 1].t_peak - c.t) <
               std::abs(sc.pulses[pi].t_peak - c.t)) {
      ++pi;
    }
    deltas.push_back(c.t - sc.pulses[pi].t_peak);
  }
  JitterResult result;
  result.n_clicks = static_cast<long>(deltas.size());
  if (result.n_clicks < 100) {
    throw std::runtime_error("jitter_experiment: too few clicks to fit (< 100)");
  }

  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= static_cast<double>(deltas.size());
  double var = 0.0;
  for (double d : deltas) var += (d - mean) * (d - mean);
  var /= static_cast<double>(deltas.size());
  const double sd = std::sqrt(var);
  if (!(sd > 1e-18)) {
    throw std::runtime_error(
        "jitter_experiment: degenerate (zero-spread) click-time histogram");
  }

  const int n_bins = 101;
  const double lo = mean - 5.0 * sd;
  const double width = 10.0 * sd / n_bins;
  result.bin_centers.resize(n_bins);
  result.counts.assign(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    result.bin_centers[b] = lo + (b + 0.5) * width;
  }
  for (double d : deltas) {
    const int b = static_cast<int>((d - lo) / width);
    if (b >= 0 && b < n_bins) result.counts[b] += 1.0;
  }
  const GaussianFit fit = fit_gaussian(result.bin_centers, result.counts);
  if (!fit.converged) {
    throw std::runtime_error("jitter_experiment: Gaussian fit did not converge");
  }
  result.sigma = fit.sigma;
  result.mean = fit.mean;
  result.fwhm = sigma_to_fwhm(fit.sigma);
  result.fit_residual = fit.rms_residual;
  return result;
}

GatedBlindingPlan GatedBlindingPlan::make_continuous(double trigger_rate,
                                                     double duration,
                                                     double p_blinding,
                                                     double e_pulse,
                                                     double pulse_fwhm) {
  GatedBlindingPlan plan;
  plan.continuous = true;
  plan.on_lead = 0.0;
  plan.laser_off_margin = 0.0;
  plan.p_blinding = p_blinding;
  plan.e_pulse = e_pulse;
  plan.pulse_fwhm = pulse_fwhm;
  plan.duration = duration;
  const double period = 1.0 / trigger_rate;
  for (double t = period; t < duration - period; t += period) {
    plan.trigger_times.push_back(t);
  }
  return plan;
}

GatedBlindingPlan GatedBlindingPlan::make_gated(double trigger_rate,
                                                double duration,
                                                double p_blinding,
                                                double e_pulse, double on_lead,
                                                double laser_off_margin,
                                                double pulse_fwhm) {
  GatedBlindingPlan plan = make_continuous(trigger_rate, duration, p_blinding,
                                           e_pulse, pulse_fwhm);
  plan.continuous = false;
  plan.on_lead = on_lead;
  plan.laser_off_margin =
      laser_off_margin > 0.0 ? laser_off_margin : kSwitchOffLatency;
  return plan;
}

void GatedBlindingPlan::validate(const NfadParams& params) const {
  if (!(duration > 0.0) || trigger_times.empty()) {
    throw std::invalid_argument("GatedBlindingPlan: empty plan");
  }
  if (on_lead < 0.0 || laser_off_margin < 0.0) {
    throw std::invalid_argument("GatedBlindingPlan: negative timing");
  }
  double prev = 0.0;
  bool first = true;
  for (double t : trigger_times) {
    if (t <= 0.0 || t >= duration) {
      throw std::invalid_argument("GatedBlindingPlan: trigger outside (0, duration)");
    }
    if (!first && t - prev < params.tau_d) {
      throw std::invalid_argument(
          "GatedBlindingPlan: trigger spacing below the deadtime; the planned "
          "clicks cannot all register");
    }
    prev = t;
    first = false;
  }
  if (continuous) return;
  if (!(on_lead > 0.0)) {
    throw std::invalid_argument("GatedBlindingPlan: gated plan needs on_lead > 0");
  }
  // The plan must keep the detector dark over the quenched head of each
  // deadtime; only a short switch-off latency after the click is allowed.
  const double dark_head = params.tau_d - on_lead;
  if (!(dark_head > 0.0) || laser_off_margin > 0.01 * dark_head) {
    throw std::invalid_argument(
        "GatedBlindingPlan: invalid plan timing; blinding would illuminate "
        "the deadtime");
  }
}

OpticalScenario GatedBlindingPlan::to_scenario() const {
  OpticalScenario sc;
  sc.duration = duration;
  if (continuous) {
    sc.cw.push_back({0.0, duration, p_blinding});
  } else {
    // Illumination window around each trigger, merged when overlapping.
    for (std::size_t i = 0; i < trigger_times.size(); ++i) {
      const double a = std::max(0.0, trigger_times[i] - on_lead);
      const double b = std::min(duration, trigger_times[i] + laser_off_margin);
      if (!sc.cw.empty() && a <= sc.cw.back().t_end) {
        sc.cw.back().t_end = b;
      } else {
        sc.cw.push_back({a, b, p_blinding});
      }
    }
  }
  for (double t : trigger_times) sc.pulses.push_back({t, e_pulse, pulse_fwhm});
  return sc;
}

DetectorRun gated_blinding_run(const GatedBlindingPlan& plan,
                               const NfadParams& params, std::uint64_t seed) {
  params.validate();
  plan.validate(params);
  OpticalScenario sc = plan.to_scenario();
  sc.rng_seed = seed;
  return simulate(sc, params, seed);
}

} // namespace nfadsim

#include "nfadsim/optics.hpp"

#include "nfadsim/rng.hpp"
#include "nfadsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfadsim {

void OpticalScenario::validate_and_normalize() {
  if (!(duration > 0.0)) {
    throw std::invalid_argument("OpticalScenario: duration must be positive");
  }
  if (photon_rate < 0.0) {
    throw std::invalid_argument("OpticalScenario: photon_rate must be >= 0");
  }
  std::sort(cw.begin(), cw.end(),
            [](const CwSegment& a, const CwSegment& b) { return a.t_start < b.t_start; });
  double prev_end = 0.0;
  bool first = true;
  for (const auto& seg : cw) {
    if (!(seg.t_start < seg.t_end)) {
      throw std::invalid_argument("OpticalScenario: segment needs t_start < t_end");
    }
    if (seg.power < 0.0) {
      throw std::invalid_argument("OpticalScenario: segment power must be >= 0");
    }
    if (seg.t_start < 0.0 || seg.t_end > duration) {
      throw std::invalid_argument("OpticalScenario: segment outside [0, duration]");
    }
    if (!first && seg.t_start < prev_end) {
      throw std::invalid_argument("OpticalScenario: overlapping CW segments");
    }
    prev_end = seg.t_end;
    first = false;
  }
  std::sort(pulses.begin(), pulses.end(),
            [](const TriggerPulse& a, const TriggerPulse& b) { return a.t_peak < b.t_peak; });
  for (const auto& p : pulses) {
    if (p.energy < 0.0) {
      throw std::invalid_argument("OpticalScenario: pulse energy must be >= 0");
    }
    if (!(p.fwhm > 0.0)) {
      throw std::invalid_argument("OpticalScenario: pulse fwhm must be > 0");
    }
    if (p.t_peak < 0.0 || p.t_peak > duration) {
      throw std::invalid_argument("OpticalScenario: pulse outside [0, duration]");
    }
  }
}

double cw_power_at(const OpticalScenario& scenario, double t) {
  if (t < 0.0 || t > scenario.duration) {
    throw std::out_of_range("cw_power_at: t outside [0, duration]");
  }
  // Segments are sorted and non-overlapping; find the last one starting at
  // or before t.
  auto it = std::upper_bound(
      scenario.cw.begin(), scenario.cw.end(), t,
      [](double value, const CwSegment& seg) { return value < seg.t_start; });
  if (it == scenario.cw.begin()) return 0.0;
  --it;
  return (t < it->t_end) ? it->power : 0.0;
}

double instantaneous_power(const OpticalScenario& scenario, double t) {
  double p = cw_power_at(scenario, t);
  for (const auto& pulse : scenario.pulses) {
    const double sigma = fwhm_to_sigma(pulse.fwhm);
    const double dt = t - pulse.t_peak;
    if (std::abs(dt) > 8.0 * sigma) continue;
    const double peak = pulse.energy / (sigma * std::sqrt(2.0 * M_PI));
    p += peak * std::exp(-0.5 * dt * dt / (sigma * sigma));
  }
  return p;
}

std::vector<double> sample_photon_arrivals(const OpticalScenario& scenario) {
  if (scenario.photon_rate < 0.0) {
    throw std::invalid_argument("sample_photon_arrivals: photon_rate must be >= 0");
  }
  std::vector<double> arrivals;
  if (scenario.photon_rate == 0.0) return arrivals;
  auto rng = make_rng(scenario.rng_seed, /*stream=*/1);
  std::exponential_distribution<double> gap(scenario.photon_rate);
  arrivals.reserve(static_cast<std::size_t>(
      std::min(scenario.photon_rate * scenario.duration * 1.1 + 16.0, 1e8)));
  double t = gap(rng);
  while (t < scenario.duration) {
    arrivals.push_back(t);
    t += gap(rng);
  }
  return arrivals;
}

} // namespace nfadsim

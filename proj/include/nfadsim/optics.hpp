#pragma once

#include <cstdint>
#include <vector>

namespace nfadsim {

/// One constant-power stretch of the CW (blinding) laser.
struct CwSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double power = 0.0; // watts
};

/// One bright trigger pulse. The pulse is treated impulsively for click
/// decisions (all energy deposited at t_peak); the envelope width only
/// matters for timing.
struct TriggerPulse {
  double t_peak = 0.0;
  double energy = 0.0; // joules
  double fwhm = 33e-12;
};

/// Deterministic-plus-stochastic optical timeline seen by one detector:
/// CW segments, trigger pulses and a homogeneous Poisson single-photon flux.
struct OpticalScenario {
  std::vector<CwSegment> cw;
  std::vector<TriggerPulse> pulses;
  double photon_rate = 0.0; // Hz
  double duration = 0.0;    // seconds
  std::uint64_t rng_seed = 0;

  /// Sorts segments and pulses, then throws std::invalid_argument on the
  /// first violated invariant (overlapping segments, events outside
  /// [0, duration], nonpositive duration, ...).
  void validate_and_normalize();
};

/// CW power of the covering segment at time t; segments are half-open
/// [t_start, t_end). Throws std::out_of_range for t outside [0, duration].
double cw_power_at(const OpticalScenario& scenario, double t);

/// CW power plus the Gaussian pulse envelopes at time t.
double instantaneous_power(const OpticalScenario& scenario, double t);

/// Homogeneous Poisson realization of the single-photon arrival times over
/// [0, duration), reproducible from scenario.rng_seed.
std::vector<double> sample_photon_arrivals(const OpticalScenario& scenario);

} // namespace nfadsim

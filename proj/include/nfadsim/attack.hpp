#pragma once

#include "nfadsim/detector.hpp"

#include <cstdint>
#include <vector>

namespace nfadsim {

struct ClickCurvePoint {
  double energy = 0.0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  long n_trials = 0;
  long n_clicks = 0;
};

/// Measured forced-click probability versus pulse energy under CW blinding.
/// Sends n_trials pulses per energy at trigger_rate and reports the click
/// fraction with its Wilson interval. Refuses (std::invalid_argument) if
/// p_blinding does not blind the detector: the curve would mix Geiger
/// clicks.
std::vector<ClickCurvePoint> estimate_click_curve(
    double p_blinding, const std::vector<double>& energies, long n_trials,
    const NfadParams& params, std::uint64_t seed, double trigger_rate = 40e3);

struct ThresholdEstimate {
  double e_never = 0.0;  ///< largest tested energy whose Wilson upper bound <= epsilon
  double e_always = 0.0; ///< smallest tested energy whose Wilson lower bound >= 1-epsilon
};

/// Statistical estimate of the never/always-click energies at one blinding
/// power: geometric bracketing followed by bisection on log-energy down to
/// 1% relative width, n_trials pulses per probe.
ThresholdEstimate estimate_thresholds(double p_blinding,
                                      const NfadParams& params,
                                      double epsilon, long n_trials,
                                      std::uint64_t seed,
                                      double trigger_rate = 40e3);

struct ThresholdMapEntry {
  double p_blinding = 0.0;
  double e_never = 0.0;
  double e_always = 0.0;
};

/// (E_never, E_always) pairs indexed by blinding power, with the estimation
/// configuration they were produced under.
struct ThresholdMap {
  std::vector<ThresholdMapEntry> entries; ///< sorted by p_blinding
  NfadParams params;
  double epsilon = 0.005;
  long n_trials = 0;
};

ThresholdMap build_threshold_map(const std::vector<double>& blinding_powers,
                                 const NfadParams& params, double epsilon,
                                 long n_trials, std::uint64_t seed,
                                 double trigger_rate = 40e3);

enum class JitterSource {
  FakedState,  ///< blinded detector, bright trigger pulses
  SinglePhoton ///< Geiger detector, attenuated/bright pulses detected as photons
};

struct JitterResult {
  std::vector<double> bin_centers; ///< click time minus pulse peak, seconds
  std::vector<double> counts;
  double fwhm = 0.0;
  double sigma = 0.0;
  double mean = 0.0;
  double fit_residual = 0.0;
  long n_clicks = 0;
};

/// Time-correlated histogram of click time minus pulse peak with a
/// least-squares Gaussian fit. For FakedState the detector is blinded at
/// p_blinding and e_pulse should exceed E_always; for SinglePhoton the
/// detector runs dark (Geiger) and pulses are detected as photon clicks.
/// Throws std::runtime_error if fewer than 100 clicks are collected.
JitterResult jitter_experiment(double p_blinding, double e_pulse,
                               long n_pulses, const NfadParams& params,
                               std::uint64_t seed, JitterSource source,
                               double pulse_fwhm, double trigger_rate = 40e3);

/// Eve's illumination schedule for the deadtime-gated blinding strategy:
/// forced clicks at trigger_times; blinding kept off while the detector is
/// inactive and restored on_lead before each trigger, staying on for
/// laser_off_margin after the click.
struct GatedBlindingPlan {
  std::vector<double> trigger_times;
  double laser_off_margin = 0.0; ///< blinding-on time kept after a click
  double on_lead = 0.5e-6;      ///< re-illumination lead before each trigger
  double p_blinding = 0.0;
  double e_pulse = 0.0;
  double pulse_fwhm = 33e-12;
  double duration = 0.0;
  bool continuous = false; ///< laser never gates off

  static GatedBlindingPlan make_continuous(double trigger_rate, double duration,
                                           double p_blinding, double e_pulse,
                                           double pulse_fwhm = 33e-12);
  static GatedBlindingPlan make_gated(double trigger_rate, double duration,
                                      double p_blinding, double e_pulse,
                                      double on_lead = 0.5e-6,
                                      double laser_off_margin = 0.0,
                                      double pulse_fwhm = 33e-12);

  /// Enforces the gating invariant: no illumination inside
  /// [t_click, t_click + tau_d - on_lead) for any planned click.
  void validate(const NfadParams& params) const;

  OpticalScenario to_scenario() const;
};

/// Builds the plan's scenario and simulates it.
DetectorRun gated_blinding_run(const GatedBlindingPlan& plan,
                               const NfadParams& params, std::uint64_t seed);

} // namespace nfadsim

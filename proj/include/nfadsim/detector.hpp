#pragma once

#include "nfadsim/circuit.hpp"
#include "nfadsim/optics.hpp"
#include "nfadsim/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfadsim {

enum class ClickCause { Photon, FakedState, Dark };

std::string to_string(ClickCause cause);

/// One registered detector output pulse.
struct ClickEvent {
  double t = 0.0;         ///< registered click time, after jitter
  ClickCause cause = ClickCause::Photon;
  double amplitude = 0.0; ///< comparator-input amplitude that crossed v_th
};

/// Piecewise-constant supply-current segment [t_start, t_end).
struct CurrentSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double current = 0.0;
};

/// Result of one detector simulation: the click record plus the supply
/// current trace that the monitors consume.
struct DetectorRun {
  std::vector<ClickEvent> clicks;
  std::vector<CurrentSegment> current_trace; ///< tiles [0, duration]
  NfadParams params;
  OpticalScenario scenario;
  std::uint64_t rng_seed = 0;

  double duration() const { return scenario.duration; }
  double mean_current() const;
  double current_at(double t) const;
};

/// Probability that a trigger pulse of energy e_pulse forces a click on a
/// blinded detector at operating point op:
///   A = amp_transimpedance * (e_pulse / E_photon) * q_e * gain,
///   p = Phi((A - v_th) / noise_sigma).
/// Requires op.mode == Linear (std::invalid_argument otherwise).
double click_probability(double e_pulse, const OperatingPoint& op,
                         const NfadParams& params);

/// Comparator-input amplitude of a pulse of energy e_pulse at gain m.
double pulse_amplitude(double e_pulse, double gain, const NfadParams& params);

/// Event-driven simulation of one scenario.
///
/// Geiger mode: each photon clicks with probability `efficiency`, dark
/// counts arrive at dark_count_rate, bright pulses click with probability
/// 1 - exp(-n_photons * efficiency). Linear (blinded) mode: photons never
/// click; each pulse clicks per click_probability at the local operating
/// point. Pulses arriving inside a deadtime are suppressed entirely. Every
/// click opens a deadtime tau_d during which the quenched operating point
/// sets the current; Geiger clicks additionally draw avalanche_charge from
/// the supply, spread over the deadtime. Registered times carry Gaussian
/// jitter (sp_jitter_fwhm for photon/dark causes, pulse fwhm (+) electronics
/// jitter in quadrature for forced clicks) and are re-arm clamped so that
/// consecutive clicks are never closer than tau_d.
DetectorRun simulate(const OpticalScenario& scenario, const NfadParams& params,
                     std::uint64_t seed);

struct RatePoint {
  double rate_in = 0.0;      ///< incident photon rate, Hz
  double rate_out = 0.0;     ///< measured click rate, Hz
  double mean_current = 0.0; ///< time-averaged supply current, A
};

/// Count rate and mean current versus incident photon rate (the detector's
/// response curve; saturates at 1/tau_d, then drops to zero once the flux
/// blinds the diode).
std::vector<RatePoint> count_rate_curve(const std::vector<double>& photon_rates,
                                        const NfadParams& params,
                                        double duration = 0.1,
                                        std::uint64_t seed = 1);

} // namespace nfadsim

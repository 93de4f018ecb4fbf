#pragma once

#include <string>

namespace nfadsim {

/// Electrical and optical parameter set of one free-running NFAD detector
/// channel. Voltages in volts, resistances in ohms, times in seconds,
/// energies in joules, currents in amperes.
struct NfadParams {
  double v_br = 47.0;       ///< breakdown voltage
  double v_excess = 1.3;    ///< excess bias above breakdown; V_bias = v_br + v_excess
  double r_integrated = 1.1e6; ///< quenching resistor integrated into the NFAD
  double r1 = 1e3;          ///< external series resistor
  double r2 = 50.0;         ///< external series resistor
  double v_quench = 5.0;    ///< anode voltage applied during deadtime
  double v_th = 0.1;        ///< comparator threshold at the amplifier output
  double tau_d = 18e-6;     ///< deadtime after each registered click

  double responsivity = 1.0;      ///< A/W unity-gain photoresponse at 1550 nm
  double gain_exponent = 30.0;    ///< inner exponent n of the avalanche gain law
  double gain_order = 1.0;        ///< outer exponent m of the gain law
  double geiger_margin = 1e-3;    ///< band below v_br where free-running
                                  ///< avalanching persists; a CW operating
                                  ///< point inside it does not blind

  double amp_transimpedance = 5.428e11; ///< V per coulomb of avalanche charge
  double noise_sigma = 5e-3;            ///< Gaussian amplitude noise, comparator input
  double sp_jitter_fwhm = 104.9e-12;    ///< single-photon detection jitter
  double electronics_jitter_fwhm = 5.15e-12; ///< residual jitter on forced clicks
  double efficiency = 0.10;   ///< single-photon detection efficiency at this bias
  double active_diameter = 22e-6; ///< diode active area diameter

  double dark_count_rate = 0.0;     ///< Hz, Geiger-mode dark clicks
  double avalanche_charge = 1.5e-12; ///< C drawn from the supply per Geiger avalanche
  double geiger_amplitude = 1.0;    ///< comparator-input amplitude of a Geiger pulse

  double v_bias() const { return v_br + v_excess; }
  double series_resistance() const { return r_integrated + r1 + r2; }

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

enum class ApdMode { Geiger, Linear, Quenched };

std::string to_string(ApdMode mode);

/// Steady-state solution of the diode inside its bias network.
struct OperatingPoint {
  double v_apd = 0.0; ///< voltage across the APD
  double i_apd = 0.0; ///< current through the APD
  double gain = 1.0;  ///< multiplication factor at v_apd
  ApdMode mode = ApdMode::Geiger;
};

} // namespace nfadsim

#pragma once

#include "nfadsim/params.hpp"

namespace nfadsim {

/// Avalanche multiplication factor below breakdown,
///   M(v) = (1 - (v/v_br)^n)^(-m).
/// Strictly increasing on [0, v_br), M(0) = 1, diverges at v_br.
/// Throws std::domain_error for v_apd outside [0, v_br); callers must branch
/// on the operating mode first.
double gain(double v_apd, const NfadParams& params);

/// DC operating point of the APD under CW illumination p_optical (watts).
///
/// Solves v = V_eff - S*M(v)*P*R_s by bracketed bisection, where
/// V_eff = V_bias - (v_quench if quenched) and R_s is the total series
/// resistance. An unquenched point only counts as linear-mode (blinded) if
/// the root lies more than geiger_margin below v_br; otherwise the detector
/// keeps free-running and the mode is Geiger with zero steady current.
/// A quenched detector is circuit-held, so any root below v_br qualifies.
OperatingPoint solve_operating_point(double p_optical, const NfadParams& params,
                                     bool quenched);

/// Smallest CW power that holds the (unquenched) detector in linear mode.
/// Bisection over power to 1e-3 relative tolerance.
double min_blinding_power(const NfadParams& params);

} // namespace nfadsim

#include "nfadsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfadsim {

namespace {

// Linear-root classification tie: a root this close to the bracket edge is
// still reported as the edge value.
constexpr double kTieEps = 1e-6;      // volts
constexpr double kBracketTol = 1e-10; // volts, bisection stop
constexpr int kMaxIterations = 200;

double gain_unchecked(double v, const NfadParams& p) {
  const double x = v / p.v_br;
  return std::pow(1.0 - std::pow(x, p.gain_exponent), -p.gain_order);
}

} // namespace

double gain(double v_apd, const NfadParams& params) {
  if (!(v_apd >= 0.0) || v_apd >= params.v_br) {
    throw std::domain_error(
        "gain: v_apd must lie in [0, v_br); Geiger-mode gain is not finite");
  }
  return gain_unchecked(v_apd, params);
}

OperatingPoint solve_operating_point(double p_optical, const NfadParams& params,
                                     bool quenched) {
  if (!(p_optical >= 0.0)) {
    throw std::invalid_argument("solve_operating_point: p_optical must be >= 0");
  }
  const double v_eff = params.v_bias() - (quenched ? params.v_quench : 0.0);
  if (v_eff <= 0.0) {
    throw std::invalid_argument(
        "solve_operating_point: effective bias is not positive (invalid quench "
        "configuration)");
  }
  const double r_s = params.series_resistance();
  const double s = params.responsivity;
  const ApdMode linear_mode = quenched ? ApdMode::Quenched : ApdMode::Linear;

  // An unquenched point must clear the free-running band below breakdown to
  // count as blinded; a quenched diode is circuit-held, so any sub-breakdown
  // root qualifies.
  const double edge = quenched ? params.v_br - kTieEps
                               : params.v_br - params.geiger_margin;
  const double cap = std::min(v_eff, edge);

  if (p_optical == 0.0) {
    if (v_eff > params.v_br) return {v_eff, 0.0, 1.0, ApdMode::Geiger};
    const double v = std::min(v_eff, params.v_br - kTieEps);
    return {v_eff, 0.0, gain_unchecked(v, params), linear_mode};
  }

  auto residual = [&](double v) {
    return v_eff - s * gain_unchecked(v, params) * p_optical * r_s - v;
  };

  // Deep saturation: even at unity gain the photocurrent drops the whole
  // bias across the resistors; the diode voltage pins at zero.
  if (residual(0.0) <= 0.0) {
    return {0.0, s * p_optical, 1.0, linear_mode};
  }

  if (cap <= 0.0 || residual(cap) >= 0.0) {
    // No root below the cap: illumination too weak to hold the diode down.
    if (v_eff > params.v_br) return {v_eff, 0.0, 1.0, ApdMode::Geiger};
    // Sub-breakdown bias with a root pinched against the tie band.
    const double m = gain_unchecked(cap, params);
    return {cap, s * m * p_optical, m, linear_mode};
  }

  double lo = 0.0;
  double hi = cap;
  int it = 0;
  while (hi - lo > kBracketTol) {
    if (++it > kMaxIterations) {
      throw std::runtime_error(
          "solve_operating_point: bisection failed to converge "
          "(ill-conditioned parameters)");
    }
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double v = 0.5 * (lo + hi);
  const double m = gain_unchecked(v, params);
  return {v, s * m * p_optical, m, linear_mode};
}

double min_blinding_power(const NfadParams& params) {
  params.validate();
  auto blinded = [&](double p) {
    return solve_operating_point(p, params, false).mode == ApdMode::Linear;
  };
  double hi = 1e-12;
  while (!blinded(hi)) {
    hi *= 2.0;
    if (hi > 10.0) {
      throw std::runtime_error("min_blinding_power: no blinding power found");
    }
  }
  double lo = 0.0;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (blinded(mid) ? hi : lo) = mid;
  }
  return hi;
}

} // namespace nfadsim

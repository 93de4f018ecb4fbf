#pragma once

#include "nfadsim/params.hpp"
#include "nfadsim/presets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace nfadsim::test {

// Default-constructed NfadParams: classic one-exponent gain law (n = 30,
// m = 1), 1 mV geiger margin. Most analytic unit checks run on this set.
inline NfadParams basic_params() { return NfadParams{}; }

inline NfadParams d1() { return detector_preset("d1").params; }
inline NfadParams d2() { return detector_preset("d2").params; }
inline NfadParams d3() { return detector_preset("d3").params; }
inline NfadParams d4() { return detector_preset("d4").params; }

// Closed-form minimum blinding power implied by the bracketed solver: the
// weakest CW power whose operating point clears the free-running band.
inline double min_blinding_power_formula(const NfadParams& p) {
  const double cap = p.v_br - p.geiger_margin;
  const double m = std::pow(
      1.0 - std::pow(cap / p.v_br, p.gain_exponent), -p.gain_order);
  return (p.v_bias() - cap) / (p.responsivity * m * p.series_resistance());
}

// Random but solver-friendly parameter draw for property tests.
inline NfadParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NfadParams p;
  p.v_br = 30.0 + 40.0 * u(rng);
  p.v_excess = 0.5 + 5.0 * u(rng);
  p.r_integrated = 0.5e6 + 1.5e6 * u(rng);
  p.r1 = 100.0 + 2e3 * u(rng);
  p.r2 = 10.0 + 200.0 * u(rng);
  p.v_quench = std::min(2.0 + 4.0 * u(rng), p.v_excess + 0.5 * p.v_br);
  p.responsivity = 0.3 + 1.2 * u(rng);
  p.gain_exponent = 5.0 + 40.0 * u(rng);
  p.gain_order = 1.0 + 5.0 * u(rng);
  p.geiger_margin = 1e-3 + 1.0 * u(rng);
  return p;
}

// Two-sided Kolmogorov-Smirnov statistic of `sorted` against the CDF values
// already evaluated at each sample.
inline double ks_statistic(const std::vector<double>& cdf_at_sorted) {
  const double n = static_cast<double>(cdf_at_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_at_sorted.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(cdf_at_sorted[i] - lo),
                  std::abs(cdf_at_sorted[i] - hi)});
  }
  return d;
}

} // namespace nfadsim::test

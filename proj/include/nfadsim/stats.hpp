#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace nfadsim {

/// Standard normal CDF.
double normal_cdf(double x);

/// Wilson score interval for k successes in n trials at normal quantile z
/// (default 95%). Returns {lo, hi}.
std::pair<double, double> wilson_interval(long k, long n, double z = 1.959964);

/// Pool-adjacent-violators fit: the nondecreasing sequence closest (L2,
/// weighted) to y. Used to quantify monotonicity of measured click curves.
std::vector<double> isotonic_fit(const std::vector<double>& y,
                                 const std::vector<double>& weights = {});

struct GaussianFit {
  double amplitude = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
  double rms_residual = 0.0; // relative to the fitted amplitude
  bool converged = false;
};

/// Least-squares Gaussian fit to binned counts (Gauss-Newton, moment-based
/// start). Bin centers must be equally spaced and counts nonnegative.
GaussianFit fit_gaussian(const std::vector<double>& bin_centers,
                         const std::vector<double>& counts);

} // namespace nfadsim

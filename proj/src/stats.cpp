#include "nfadsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nfadsim {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

std::pair<double, double> wilson_interval(long k, long n, double z) {
  if (n <= 0 || k < 0 || k > n) {
    throw std::invalid_argument("wilson_interval: need 0 <= k <= n, n > 0");
  }
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<double> isotonic_fit(const std::vector<double>& y,
                                 const std::vector<double>& weights) {
  const std::size_t n = y.size();
  std::vector<double> w = weights.empty() ? std::vector<double>(n, 1.0) : weights;
  if (w.size() != n) {
    throw std::invalid_argument("isotonic_fit: weights size mismatch");
  }
  // Pool adjacent violators with weighted block means.
  struct Block {
    double sum, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back({y[i] * w[i], w[i], 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.weight <= b.sum / b.weight) break;
      a.sum += b.sum;
      a.weight += b.weight;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::vector<double> fit;
  fit.reserve(n);
  for (const auto& b : blocks) {
    fit.insert(fit.end(), b.count, b.sum / b.weight);
  }
  return fit;
}

GaussianFit fit_gaussian(const std::vector<double>& bin_centers,
                         const std::vector<double>& counts) {
  if (bin_centers.size() != counts.size() || bin_centers.size() < 5) {
    throw std::invalid_argument("fit_gaussian: need >= 5 matching bins");
  }
  const std::size_t n = bin_centers.size();

  // Moment start values.
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += counts[i];
    mean += counts[i] * bin_centers[i];
  }
  if (total <= 0.0) throw std::invalid_argument("fit_gaussian: empty histogram");
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = bin_centers[i] - mean;
    var += counts[i] * d * d;
  }
  var /= total;
  double sigma = std::sqrt(std::max(var, 1e-300));
  double amp = *std::max_element(counts.begin(), counts.end());

  GaussianFit fit;
  // Gauss-Newton on (amp, mean, sigma).
  for (int iter = 0; iter < 60; ++iter) {
    double jtj[3][3] = {};
    double jtr[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (bin_centers[i] - mean) / sigma;
      const double e = std::exp(-0.5 * d * d);
      const double model = amp * e;
      const double r = counts[i] - model;
      const double j0 = e;
      const double j1 = model * d / sigma;
      const double j2 = model * d * d / sigma;
      const double j[3] = {j0, j1, j2};
      for (int a = 0; a < 3; ++a) {
        jtr[a] += j[a] * r;
        for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
      }
    }
    // Levenberg damping keeps early steps stable.
    const double lambda = 1e-6;
    for (int a = 0; a < 3; ++a) jtj[a][a] *= 1.0 + lambda;

    // Solve the 3x3 system by Gaussian elimination.
    double m[3][4];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] = jtj[a][b];
      m[a][3] = jtr[a];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row) {
        if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
      }
      std::swap(m[col], m[piv]);
      if (std::abs(m[col][col]) < 1e-300) return fit; // singular, not converged
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        const double f = m[row][col] / m[col][col];
        for (int b = col; b < 4; ++b) m[row][b] -= f * m[col][b];
      }
    }
    const double da = m[0][3] / m[0][0];
    const double dm = m[1][3] / m[1][1];
    const double ds = m[2][3] / m[2][2];
    amp += da;
    mean += dm;
    sigma += ds;
    sigma = std::abs(sigma);
    if (sigma < 1e-300 || amp <= 0.0) return fit;
    if (std::abs(dm) < 1e-6 * sigma && std::abs(ds) < 1e-6 * sigma &&
        std::abs(da) < 1e-6 * amp) {
      fit.converged = true;
      break;
    }
    if (iter == 59) fit.converged = true; // accept the last iterate
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (bin_centers[i] - mean) / sigma;
    const double r = counts[i] - amp * std::exp(-0.5 * d * d);
    ss += r * r;
  }
  fit.amplitude = amp;
  fit.mean = mean;
  fit.sigma = sigma;
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n)) / amp;
  return fit;
}

} // namespace nfadsim

#include "nfadsim/qkd.hpp"

#include "nfadsim/rng.hpp"

#include <random>
#include <stdexcept>

namespace nfadsim {

Bb84Stats run_bb84_attack(const Bb84AttackConfig& config,
                          const NfadParams& params, double p_blinding,
                          std::uint64_t seed) {
  params.validate();
  if (config.n_rounds <= 0) {
    throw std::invalid_argument("run_bb84_attack: n_rounds must be > 0");
  }
  if (!(config.trigger_rate > 0.0) ||
      config.trigger_rate >= 1.0 / params.tau_d) {
    throw std::invalid_argument(
        "run_bb84_attack: trigger_rate must stay below 1/tau_d");
  }
  if (!(config.e_pulse >= 0.0)) {
    throw std::invalid_argument("run_bb84_attack: e_pulse must be >= 0");
  }
  const OperatingPoint op = solve_operating_point(p_blinding, params, false);
  if (op.mode != ApdMode::Linear) {
    throw std::invalid_argument(
        "run_bb84_attack: p_blinding does not blind Bob's detectors");
  }

  const double p_full = click_probability(config.e_pulse, op, params);
  const double p_half = click_probability(0.5 * config.e_pulse, op, params);
  const double p_zero = click_probability(0.0, op, params);

  auto rng = make_rng(seed ^ config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coin = [&] { return unit(rng) < 0.5; };

  Bb84Stats stats;
  stats.n_rounds = config.n_rounds;
  long n_any = 0, n_match = 0;
  for (long round = 0; round < config.n_rounds; ++round) {
    const bool alice_basis = coin();
    const bool alice_bit = coin();
    const bool eve_basis = coin();
    // Intercept: measuring in the wrong basis yields a random bit.
    const bool eve_bit = (eve_basis == alice_basis) ? alice_bit : coin();
    const bool bob_basis = coin();

    bool click0, click1;
    if (bob_basis == eve_basis) {
      ++n_match;
      const bool c_target = unit(rng) < p_full;
      const bool c_other = unit(rng) < p_zero;
      click0 = eve_bit ? c_other : c_target;
      click1 = eve_bit ? c_target : c_other;
    } else {
      // Basis mismatch halves the pulse energy onto each detector.
      click0 = unit(rng) < p_half;
      click1 = unit(rng) < p_half;
    }
    if (click0 || click1) ++n_any;
    if (click0 && click1) ++stats.n_double;
    if (click0 != click1 && bob_basis == alice_basis) {
      ++stats.n_sifted;
      const bool bob_bit = click1;
      if (bob_bit != alice_bit) ++stats.n_errors;
    }
  }
  const double n = static_cast<double>(config.n_rounds);
  stats.bob_click_rate = n_any / n;
  stats.double_click_rate = static_cast<double>(stats.n_double) / n;
  stats.basis_match_fraction = n_match / n;
  stats.qber_contribution =
      stats.n_sifted > 0
          ? static_cast<double>(stats.n_errors) / static_cast<double>(stats.n_sifted)
          : 0.0;
  return stats;
}

std::vector<FeasibilityEntry> attack_feasibility(const ThresholdMap& map) {
  if (map.entries.empty()) {
    throw std::invalid_argument("attack_feasibility: empty threshold map");
  }
  std::vector<FeasibilityEntry> out;
  out.reserve(map.entries.size());
  for (const auto& e : map.entries) {
    FeasibilityEntry f;
    f.p_blinding = e.p_blinding;
    f.feasible = e.e_always < 2.0 * e.e_never;
    if (f.feasible) {
      f.window_lo = e.e_always;
      f.window_hi = 2.0 * e.e_never;
    }
    out.push_back(f);
  }
  return out;
}

} // namespace nfadsim

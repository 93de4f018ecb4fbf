#include <doctest.h>

#include "helpers.hpp"
#include "nfadsim/qkd.hpp"

#include <cmath>
#include <stdexcept>

using namespace nfadsim;

TEST_SUITE_BEGIN("qkd");

namespace {

Bb84AttackConfig config_for(double e_pulse, long rounds, const ThresholdEstimate& est) {
  Bb84AttackConfig cfg;
  cfg.e_pulse = e_pulse;
  cfg.trigger_rate = 40e3;
  cfg.n_rounds = rounds;
  cfg.e_never = est.e_never;
  cfg.e_always = est.e_always;
  cfg.rng_seed = 77;
  return cfg;
}

} // namespace

TEST_CASE("in-window faked states give Eve a clean half-rate key") {
  const NfadParams p = test::d1();
  const double p_b = 1e-6;
  const auto est = estimate_thresholds(p_b, p, 0.005, 4000, 31);
  REQUIRE(est.e_always < 2.0 * est.e_never); // feasible at high power
  const double e_pulse = std::sqrt(est.e_always * 2.0 * est.e_never);

  const auto stats = run_bb84_attack(config_for(e_pulse, 100000, est), p, p_b, 3);
  CHECK(stats.basis_match_fraction == doctest::Approx(0.5).epsilon(0.02));
  CHECK(stats.bob_click_rate > 0.49);
  CHECK(stats.bob_click_rate < 0.51);
  CHECK(stats.qber_contribution < 0.01);
  CHECK(stats.double_click_rate < 1e-3);

  // Analytic cross-check of the click rate.
  const OperatingPoint op = solve_operating_point(p_b, p, false);
  const double pf = click_probability(e_pulse, op, p);
  const double ph = click_probability(0.5 * e_pulse, op, p);
  const double expected = 0.5 * pf + 0.5 * (1.0 - (1.0 - ph) * (1.0 - ph));
  const double sigma = std::sqrt(expected * (1.0 - expected) / 100000.0);
  CHECK(std::abs(stats.bob_click_rate - expected) < 4.0 * sigma + 1e-6);
}

TEST_CASE("pulses below e_never never click") {
  const NfadParams p = test::d1();
  const double p_b = 1e-6;
  const auto est = estimate_thresholds(p_b, p, 0.005, 4000, 32);
  const auto stats =
      run_bb84_attack(config_for(0.5 * est.e_never, 50000, est), p, p_b, 4);
  CHECK(stats.bob_click_rate < 1e-3);
  CHECK(stats.n_double == 0);
}

TEST_CASE("transition-region energies match the analytic half-curve") {
  const NfadParams p = test::d1();
  const double p_b = 1e-6;
  const OperatingPoint op = solve_operating_point(p_b, p, false);
  const auto est = estimate_thresholds(p_b, p, 0.005, 4000, 33);
  // Mid-transition: amplitude at the comparator threshold.
  const double e_mid = std::sqrt(est.e_never * est.e_always);
  const long rounds = 200000;
  const auto stats = run_bb84_attack(config_for(e_mid, rounds, est), p, p_b, 5);
  const double p_mid = click_probability(e_mid, op, p);
  const double expected = 0.5 * p_mid; // half-energy path contributes ~0
  const double sigma = std::sqrt(expected * (1.0 - expected) / rounds);
  CHECK(stats.bob_click_rate > 0.05);
  CHECK(stats.bob_click_rate < 0.45);
  CHECK(std::abs(stats.bob_click_rate - expected) < 4.0 * sigma + 1e-4);
}

TEST_CASE("attack refuses unblinded receivers and bad configs") {
  const NfadParams p = test::d1();
  ThresholdEstimate est{1e-15, 2e-15};
  CHECK_THROWS_AS(
      run_bb84_attack(config_for(1.5e-15, 1000, est), p, 1e-11, 6),
      std::invalid_argument);
  auto cfg = config_for(1.5e-15, 1000, est);
  cfg.trigger_rate = 1e6; // above 1/tau_d
  CHECK_THROWS_AS(run_bb84_attack(cfg, p, 1e-6, 6), std::invalid_argument);
  cfg = config_for(1.5e-15, 0, est);
  CHECK_THROWS_AS(run_bb84_attack(cfg, p, 1e-6, 6), std::invalid_argument);
}

TEST_CASE("feasibility window logic") {
  ThresholdMap map;
  map.params = test::d1();
  map.entries = {
      {1e-8, 1e-15, 2.5e-15},  // wide transition: e_always > 2 e_never
      {1e-7, 2e-15, 2e-15},    // degenerate sharp transition
      {1e-6, 4e-15, 6e-15},    // comfortable window
  };
  const auto feas = attack_feasibility(map);
  REQUIRE(feas.size() == 3);
  CHECK(!feas[0].feasible);
  CHECK(feas[1].feasible);
  CHECK(feas[1].window_lo == doctest::Approx(2e-15));
  CHECK(feas[1].window_hi == doctest::Approx(4e-15));
  CHECK(feas[2].feasible);
  CHECK(feas[2].window_lo == doctest::Approx(6e-15));
  CHECK(feas[2].window_hi == doctest::Approx(8e-15));

  ThresholdMap empty;
  CHECK_THROWS_AS(attack_feasibility(empty), std::invalid_argument);
}

TEST_CASE("calibrated map is feasible at high blinding power") {
  const NfadParams p = test::d1();
  const auto map = build_threshold_map({1e-6}, p, 0.005, 4000, 34);
  const auto feas = attack_feasibility(map);
  REQUIRE(feas.size() == 1);
  CHECK(feas[0].feasible);
  // Cross-check with a simulated attack inside the window.
  const double e = std::sqrt(feas[0].window_lo * feas[0].window_hi);
  ThresholdEstimate est{map.entries[0].e_never, map.entries[0].e_always};
  const auto stats = run_bb84_attack(config_for(e, 50000, est), p, 1e-6, 7);
  CHECK(stats.qber_contribution < 0.01);
  CHECK(stats.bob_click_rate > 0.49);
}

TEST_CASE("comparator-referred scaling leaves the statistics unchanged") {
  const NfadParams base = test::d1();
  NfadParams rescaled = base;
  rescaled.amp_transimpedance *= 0.5;
  const double p_b = 1e-6;
  const auto est = estimate_thresholds(p_b, base, 0.005, 2000, 35);
  const double e = std::sqrt(est.e_always * 2.0 * est.e_never);

  ThresholdEstimate est2{2.0 * est.e_never, 2.0 * est.e_always};
  const auto a = run_bb84_attack(config_for(e, 50000, est), base, p_b, 8);
  const auto b =
      run_bb84_attack(config_for(2.0 * e, 50000, est2), rescaled, p_b, 8);
  // Identical seeds and identical comparator decisions: exact equality.
  CHECK(a.bob_click_rate == b.bob_click_rate);
  CHECK(a.qber_contribution == b.qber_contribution);
  CHECK(a.double_click_rate == b.double_click_rate);
  CHECK(a.basis_match_fraction == b.basis_match_fraction);
}

TEST_CASE("all reported fractions live in [0, 1]") {
  const NfadParams p = test::d1();
  const auto est = estimate_thresholds(1e-6, p, 0.005, 2000, 36);
  for (double e : {0.1 * est.e_never, est.e_never, est.e_always, 3 * est.e_always}) {
    const auto s = run_bb84_attack(config_for(e, 20000, est), p, 1e-6, 9);
    for (double f : {s.bob_click_rate, s.qber_contribution, s.double_click_rate,
                     s.basis_match_fraction}) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_SUITE_END();

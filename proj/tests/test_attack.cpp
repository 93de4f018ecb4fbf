#include <doctest.h>

#include "helpers.hpp"
#include "nfadsim/attack.hpp"
#include "nfadsim/stats.hpp"
#include "nfadsim/units.hpp"

#include <cmath>
#include <stdexcept>

using namespace nfadsim;

TEST_SUITE_BEGIN("attack");

namespace {

double analytic_threshold_energy(double p_blinding, const NfadParams& p,
                                 double z_from_vth) {
  const OperatingPoint op = solve_operating_point(p_blinding, p, false);
  return (p.v_th + z_from_vth * p.noise_sigma) * kPhotonEnergy1550 /
         (p.amp_transimpedance * kElectronCharge * op.gain);
}

} // namespace

TEST_CASE("click-curve estimation refuses a non-blinded detector") {
  const NfadParams p = test::d2();
  const double below = 0.5 * min_blinding_power(p);
  CHECK_THROWS_AS(estimate_click_curve(below, {1e-15}, 100, p, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_thresholds(below, p, 0.005, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("measured click fractions match the analytic model") {
  const NfadParams p = test::d1();
  const double p_blinding = 250e-9;
  const double e_mid = analytic_threshold_energy(p_blinding, p, 0.0);
  std::vector<double> energies;
  for (int i = -4; i <= 4; ++i) energies.push_back(e_mid * std::pow(1.25, i));
  const long n = 4000;
  const auto curve = estimate_click_curve(p_blinding, energies, n, p, 12345);
  const OperatingPoint op = solve_operating_point(p_blinding, p, false);

  REQUIRE(curve.size() == energies.size());
  CHECK(curve.front().p_hat < 0.01);
  CHECK(curve.back().p_hat > 0.99);
  for (const auto& pt : curve) {
    const double analytic = click_probability(pt.energy, op, p);
    const double half = 0.5 * (pt.wilson_hi - pt.wilson_lo);
    CHECK(std::abs(pt.p_hat - analytic) <= 3.0 * half + 1e-12);
  }
  // Zero-energy pulses never click.
  const auto zero = estimate_click_curve(p_blinding, {0.0}, 500, p, 5);
  CHECK(zero[0].p_hat == 0.0);
}

TEST_CASE("threshold estimate collapses for a near-noiseless comparator") {
  NfadParams p = test::d2();
  p.noise_sigma = 1e-9;
  const double p_blinding = 30e-9;
  const auto est = estimate_thresholds(p_blinding, p, 0.005, 2000, 7);
  const double e_step = analytic_threshold_energy(p_blinding, p, 0.0);
  CHECK(est.e_never == doctest::Approx(e_step).epsilon(0.03));
  CHECK(est.e_always == doctest::Approx(e_step).epsilon(0.03));
  CHECK(est.e_never <= est.e_always);
}

TEST_CASE("threshold estimates track the analytic epsilon quantiles") {
  const NfadParams p = test::d2();
  const double p_blinding = 30e-9;
  const auto est = estimate_thresholds(p_blinding, p, 0.005, 10000, 99);
  // Phi^{-1}(0.995) = 2.5758
  const double e_never_analytic = analytic_threshold_energy(p_blinding, p, -2.5758);
  const double e_always_analytic = analytic_threshold_energy(p_blinding, p, 2.5758);
  CHECK(est.e_never == doctest::Approx(e_never_analytic).epsilon(0.05));
  CHECK(est.e_always == doctest::Approx(e_always_analytic).epsilon(0.05));
}

TEST_CASE("thresholds rise with blinding power deep in linear mode") {
  const NfadParams p = test::d2();
  const auto map =
      build_threshold_map({30e-9, 120e-9, 500e-9, 2e-6}, p, 0.005, 2000, 11);
  REQUIRE(map.entries.size() == 4);
  for (std::size_t i = 0; i < map.entries.size(); ++i) {
    CHECK(map.entries[i].e_never <= map.entries[i].e_always);
    if (i > 0) {
      CHECK(map.entries[i].e_never > map.entries[i - 1].e_never);
      CHECK(map.entries[i].e_always > map.entries[i - 1].e_always);
    }
  }
}

TEST_CASE("higher excess bias shifts the threshold curves right") {
  NfadParams lo = test::d2();
  NfadParams hi = test::d2();
  apply_efficiency_setting(hi, 0.20);
  // Shift along the power axis: the higher-bias detector needs more light
  // to blind at all...
  CHECK(min_blinding_power(hi) > min_blinding_power(lo));
  // ...and at equal blinding power it still has more gain, so the same
  // trigger energies sit lower on its curve.
  const double p_b = 60e-9;
  const auto est_lo = estimate_thresholds(p_b, lo, 0.005, 2000, 13);
  const auto est_hi = estimate_thresholds(p_b, hi, 0.005, 2000, 13);
  CHECK(est_hi.e_always < est_lo.e_always);
  CHECK(est_hi.e_never < est_lo.e_never);
}

TEST_CASE("jitter experiment recovers the configured widths") {
  const auto d2 = detector_preset("d2");
  const auto faked = jitter_experiment(7e-9, 12.8e-15, 30000, d2.params, 21,
                                       JitterSource::FakedState, d2.pulse_fwhm);
  CHECK(faked.fwhm == doctest::Approx(33.4e-12).epsilon(0.10));
  CHECK(faked.n_clicks == 30000);

  const auto photon = jitter_experiment(0.0, 12.8e-15, 30000, d2.params, 22,
                                        JitterSource::SinglePhoton, d2.pulse_fwhm);
  CHECK(photon.fwhm == doctest::Approx(104.9e-12).epsilon(0.10));

  const auto d3 = detector_preset("d3");
  const auto faked3 = jitter_experiment(3.3e-9, 30.9e-15, 30000, d3.params, 23,
                                        JitterSource::FakedState, d3.pulse_fwhm);
  const auto photon3 = jitter_experiment(0.0, 30.9e-15, 30000, d3.params, 24,
                                         JitterSource::SinglePhoton, d3.pulse_fwhm);
  CHECK(faked3.fwhm == doctest::Approx(100.6e-12).epsilon(0.10));
  CHECK(photon3.fwhm == doctest::Approx(271.8e-12).epsilon(0.10));
  CHECK(faked3.fwhm / photon3.fwhm == doctest::Approx(0.37).epsilon(0.10));
}

TEST_CASE("jitter experiment needs enough clicks for a fit") {
  const auto d2 = detector_preset("d2");
  CHECK_THROWS_AS(jitter_experiment(7e-9, 12.8e-15, 50, d2.params, 3,
                                    JitterSource::FakedState, d2.pulse_fwhm),
                  std::runtime_error);
}

TEST_CASE("gated plan draws strictly less current than continuous") {
  const NfadParams p = test::d2();
  const double p_b = 1.2 * min_blinding_power(p);
  const double duration = 0.05;
  const auto cont =
      GatedBlindingPlan::make_continuous(54e3, duration, p_b, 12.8e-15);
  const auto gated =
      GatedBlindingPlan::make_gated(54e3, duration, p_b, 12.8e-15, 0.7e-6);
  const DetectorRun run_c = gated_blinding_run(cont, p, 42);
  const DetectorRun run_g = gated_blinding_run(gated, p, 42);
  // Same forced-click schedule either way.
  CHECK(run_c.clicks.size() == cont.trigger_times.size());
  CHECK(run_g.clicks.size() == gated.trigger_times.size());
  CHECK(run_g.mean_current() < run_c.mean_current());
}

TEST_CASE("trigger rates drive the blinded current down") {
  NfadParams p = test::d2();
  apply_efficiency_setting(p, 0.10);
  const double p_b = 2.9574e-8;
  double prev = 1.0;
  for (double rate : {40e3, 50e3, 55e3}) {
    const auto plan =
        GatedBlindingPlan::make_continuous(rate, 0.05, p_b, 12.8e-15);
    const double mean = gated_blinding_run(plan, p, 9).mean_current();
    CHECK(mean < prev);
    prev = mean;
  }
}

TEST_CASE("plan validation rejects broken timing") {
  const NfadParams p = test::d2();
  auto plan = GatedBlindingPlan::make_gated(54e3, 0.01, 3e-9, 12.8e-15, 0.7e-6);
  plan.laser_off_margin = 5e-6; // illuminates the quenched head
  CHECK_THROWS_AS(plan.validate(p), std::invalid_argument);

  auto fast = GatedBlindingPlan::make_continuous(80e3, 0.01, 3e-9, 12.8e-15);
  CHECK_THROWS_AS(fast.validate(p), std::invalid_argument); // spacing < tau_d

  auto empty = GatedBlindingPlan{};
  CHECK_THROWS_AS(empty.validate(p), std::invalid_argument);
}

TEST_SUITE_END();

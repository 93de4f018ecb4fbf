#include "nfadsim/experiments.hpp"

#include "nfadsim/attack.hpp"
#include "nfadsim/circuit.hpp"
#include "nfadsim/detector.hpp"
#include "nfadsim/io.hpp"
#include "nfadsim/monitor.hpp"
#include "nfadsim/presets.hpp"
#include "nfadsim/qkd.hpp"
#include "nfadsim/rng.hpp"
#include "nfadsim/units.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace nfadsim {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldDef {
  const char* name;
  double NfadParams::*ptr;
};

constexpr FieldDef kDetectorFields[] = {
    {"v_br", &NfadParams::v_br},
    {"v_excess", &NfadParams::v_excess},
    {"r_integrated", &NfadParams::r_integrated},
    {"r1", &NfadParams::r1},
    {"r2", &NfadParams::r2},
    {"v_quench", &NfadParams::v_quench},
    {"v_th", &NfadParams::v_th},
    {"tau_d", &NfadParams::tau_d},
    {"responsivity", &NfadParams::responsivity},
    {"gain_exponent", &NfadParams::gain_exponent},
    {"gain_order", &NfadParams::gain_order},
    {"geiger_margin", &NfadParams::geiger_margin},
    {"amp_transimpedance", &NfadParams::amp_transimpedance},
    {"noise_sigma", &NfadParams::noise_sigma},
    {"sp_jitter_fwhm", &NfadParams::sp_jitter_fwhm},
    {"electronics_jitter_fwhm", &NfadParams::electronics_jitter_fwhm},
    {"efficiency", &NfadParams::efficiency},
    {"active_diameter", &NfadParams::active_diameter},
    {"dark_count_rate", &NfadParams::dark_count_rate},
    {"avalanche_charge", &NfadParams::avalanche_charge},
    {"geiger_amplitude", &NfadParams::geiger_amplitude},
};

void apply_detector_overrides(NfadParams& params, const ConfigFile& cfg) {
  for (const auto& key : cfg.keys()) {
    if (key.rfind("detector.", 0) != 0) continue;
    const std::string field = key.substr(9);
    bool known = false;
    for (const auto& def : kDetectorFields) {
      if (field == def.name) {
        params.*def.ptr = cfg.get_double(key, 0.0);
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown detector parameter: " + field);
    }
  }
}

void write_detector_section(ConfigFile& out, const NfadParams& params) {
  for (const auto& def : kDetectorFields) {
    out.set(std::string("detector.") + def.name, format_double(params.*def.ptr));
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file: " + path.string());
  return f;
}

// Reads a scalar from cfg (or the default), records the resolved value, and
// returns it. Every experiment parameter goes through here so the manifest
// is complete.
double resolve_double(const ConfigFile& cfg, ConfigFile& resolved,
                      const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  resolved.set(key, format_double(v));
  return v;
}

long resolve_long(const ConfigFile& cfg, ConfigFile& resolved,
                  const std::string& key, long fallback) {
  const long v = cfg.get_long(key, fallback);
  resolved.set(key, std::to_string(v));
  return v;
}

std::vector<double> resolve_list(const ConfigFile& cfg, ConfigFile& resolved,
                                 const std::string& key,
                                 const std::vector<double>& fallback) {
  const auto v = cfg.get_double_list(key, fallback);
  std::string joined;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) joined += ", ";
    joined += format_double(v[i]);
  }
  resolved.set(key, joined);
  return v;
}

struct Context {
  const ConfigFile& cfg;
  ConfigFile& resolved;
  NfadParams params;
  double pulse_fwhm;
  std::uint64_t seed;
  fs::path out_dir;
  std::ostream& log;
};

// Center of the forced-click transition at one blinded operating point;
// used only to place default energy grids.
double transition_center(const NfadParams& params, double p_blinding) {
  const OperatingPoint op = solve_operating_point(p_blinding, params, false);
  const double charge_per_joule = kElectronCharge / kPhotonEnergy1550;
  return params.v_th /
         (params.amp_transimpedance * charge_per_joule * op.gain);
}

void run_click_curve(Context& ctx) {
  const double p_blinding =
      resolve_double(ctx.cfg, ctx.resolved, "click_curve.blinding_power", 250e-9);
  const long trials =
      resolve_long(ctx.cfg, ctx.resolved, "click_curve.trials", 2000);
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "click_curve.trigger_rate", 40e3);
  std::vector<double> fallback;
  const double mid = transition_center(ctx.params, p_blinding);
  for (int i = -6; i <= 6; ++i) fallback.push_back(mid * std::pow(1.35, i));
  const auto energies =
      resolve_list(ctx.cfg, ctx.resolved, "click_curve.energies", fallback);

  const auto curve = estimate_click_curve(p_blinding, energies, trials,
                                          ctx.params, ctx.seed, trigger_rate);
  auto csv = open_out(ctx.out_dir / "click_curve.csv");
  csv << "energy_j,p_click,wilson_lo,wilson_hi,n_trials,n_clicks\n";
  for (const auto& p : curve) {
    csv << format_double(p.energy) << ',' << format_double(p.p_hat) << ','
        << format_double(p.wilson_lo) << ',' << format_double(p.wilson_hi)
        << ',' << p.n_trials << ',' << p.n_clicks << '\n';
  }
  ctx.log << "click_curve: " << curve.size() << " energies at "
          << format_double(p_blinding) << " W blinding\n";
}

void run_threshold_map(Context& ctx) {
  const double epsilon =
      resolve_double(ctx.cfg, ctx.resolved, "threshold_map.epsilon", 0.005);
  const long trials =
      resolve_long(ctx.cfg, ctx.resolved, "threshold_map.trials", 3000);
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "threshold_map.trigger_rate", 40e3);
  const double p_min = min_blinding_power(ctx.params);
  std::vector<double> fallback;
  for (double f : {2.0, 5.0, 12.0, 30.0, 80.0, 200.0}) fallback.push_back(f * p_min);
  const auto powers = resolve_list(ctx.cfg, ctx.resolved,
                                   "threshold_map.blinding_powers", fallback);

  const ThresholdMap map = build_threshold_map(powers, ctx.params, epsilon,
                                               trials, ctx.seed, trigger_rate);
  auto csv = open_out(ctx.out_dir / "threshold_map.csv");
  csv << "p_blinding_w,e_never_j,e_always_j\n";
  for (const auto& e : map.entries) {
    csv << format_double(e.p_blinding) << ',' << format_double(e.e_never)
        << ',' << format_double(e.e_always) << '\n';
  }
  ctx.log << "threshold_map: " << map.entries.size()
          << " blinding powers (min blinding power " << format_double(p_min)
          << " W)\n";
}

void run_jitter(Context& ctx) {
  // Preset-aware defaults: comfortably blinded, pulses far above E_always.
  const double p_blinding =
      resolve_double(ctx.cfg, ctx.resolved, "jitter.blinding_power",
                     3.0 * min_blinding_power(ctx.params));
  const double e_pulse =
      resolve_double(ctx.cfg, ctx.resolved, "jitter.e_pulse",
                     4.0 * transition_center(ctx.params, p_blinding));
  const long n_pulses =
      resolve_long(ctx.cfg, ctx.resolved, "jitter.n_pulses", 100000);
  const double pulse_fwhm = resolve_double(ctx.cfg, ctx.resolved,
                                           "jitter.pulse_fwhm", ctx.pulse_fwhm);
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "jitter.trigger_rate", 40e3);

  const JitterResult faked =
      jitter_experiment(p_blinding, e_pulse, n_pulses, ctx.params, ctx.seed,
                        JitterSource::FakedState, pulse_fwhm, trigger_rate);
  const JitterResult photon = jitter_experiment(
      0.0, e_pulse, n_pulses, ctx.params, splitmix64(ctx.seed ^ 2),
      JitterSource::SinglePhoton, pulse_fwhm, trigger_rate);

  auto hist = open_out(ctx.out_dir / "jitter_histogram.csv");
  hist << "source,bin_center_s,count\n";
  for (std::size_t i = 0; i < faked.bin_centers.size(); ++i) {
    hist << "faked," << format_double(faked.bin_centers[i]) << ','
         << format_double(faked.counts[i]) << '\n';
  }
  for (std::size_t i = 0; i < photon.bin_centers.size(); ++i) {
    hist << "photon," << format_double(photon.bin_centers[i]) << ','
         << format_double(photon.counts[i]) << '\n';
  }
  auto summary = open_out(ctx.out_dir / "jitter_summary.csv");
  summary << "source,fwhm_s,sigma_s,mean_s,fit_residual,n_clicks\n";
  for (const auto* r : {&faked, &photon}) {
    summary << (r == &faked ? "faked," : "photon,") << format_double(r->fwhm)
            << ',' << format_double(r->sigma) << ',' << format_double(r->mean)
            << ',' << format_double(r->fit_residual) << ',' << r->n_clicks
            << '\n';
  }
  ctx.log << "jitter: faked FWHM " << faked.fwhm * 1e12 << " ps, photon FWHM "
          << photon.fwhm * 1e12 << " ps\n";
}

void run_count_rate_sweep(Context& ctx) {
  std::vector<double> fallback;
  for (int d = 4; d <= 11; ++d) fallback.push_back(std::pow(10.0, d));
  const auto rates =
      resolve_list(ctx.cfg, ctx.resolved, "count_rate_sweep.rates", fallback);
  const double duration =
      resolve_double(ctx.cfg, ctx.resolved, "count_rate_sweep.duration", 0.05);

  const auto curve = count_rate_curve(rates, ctx.params, duration, ctx.seed);
  auto csv = open_out(ctx.out_dir / "count_rate_sweep.csv");
  csv << "photon_rate_hz,click_rate_hz,mean_current_a\n";
  for (const auto& p : curve) {
    csv << format_double(p.rate_in) << ',' << format_double(p.rate_out) << ','
        << format_double(p.mean_current) << '\n';
  }
  ctx.log << "count_rate_sweep: " << curve.size() << " rates\n";
}

void run_table_currents(Context& ctx) {
  const auto efficiencies = resolve_list(ctx.cfg, ctx.resolved,
                                         "table_currents.efficiencies",
                                         {0.10, 0.20});
  const auto trigger_rates = resolve_list(ctx.cfg, ctx.resolved,
                                          "table_currents.trigger_rates",
                                          {40e3, 50e3, 55e3});
  const auto blinding_powers = resolve_list(ctx.cfg, ctx.resolved,
                                            "table_currents.blinding_powers",
                                            {2.9574e-8, 1.14862e-8});
  const double e_pulse =
      resolve_double(ctx.cfg, ctx.resolved, "table_currents.e_pulse", 12.8e-15);
  const double duration =
      resolve_double(ctx.cfg, ctx.resolved, "table_currents.duration", 0.1);
  if (blinding_powers.size() != efficiencies.size()) {
    throw std::invalid_argument(
        "table_currents: blinding_powers must parallel efficiencies");
  }

  auto csv = open_out(ctx.out_dir / "table_currents.csv");
  csv << "efficiency,trigger_rate_hz,mean_current_a\n";
  for (std::size_t ei = 0; ei < efficiencies.size(); ++ei) {
    NfadParams params = ctx.params;
    apply_efficiency_setting(params, efficiencies[ei]);
    for (std::size_t ri = 0; ri < trigger_rates.size(); ++ri) {
      const auto plan = GatedBlindingPlan::make_continuous(
          trigger_rates[ri], duration, blinding_powers[ei], e_pulse,
          ctx.pulse_fwhm);
      const DetectorRun run = gated_blinding_run(
          plan, params, splitmix64(ctx.seed ^ (17 * ei + ri + 1)));
      csv << format_double(efficiencies[ei]) << ','
          << format_double(trigger_rates[ri]) << ','
          << format_double(run.mean_current()) << '\n';
    }
  }
  ctx.log << "table_currents: " << efficiencies.size() * trigger_rates.size()
          << " cells\n";
}

void run_gated_blinding(Context& ctx) {
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "gated_blinding.trigger_rate", 40e3);
  const double duration =
      resolve_double(ctx.cfg, ctx.resolved, "gated_blinding.duration", 2.0);
  const double p_min = min_blinding_power(ctx.params);
  const double p_blinding = resolve_double(
      ctx.cfg, ctx.resolved, "gated_blinding.blinding_power", 1.2 * p_min);
  const double e_pulse =
      resolve_double(ctx.cfg, ctx.resolved, "gated_blinding.e_pulse",
                     4.0 * transition_center(ctx.params, p_blinding));
  const double on_lead =
      resolve_double(ctx.cfg, ctx.resolved, "gated_blinding.on_lead", 0.7e-6);
  const double threshold = resolve_double(
      ctx.cfg, ctx.resolved, "gated_blinding.slow_threshold", 100e-9);
  const double sampling_period = resolve_double(
      ctx.cfg, ctx.resolved, "gated_blinding.sampling_period", 1.0);

  MonitorConfig mon;
  mon.sampling_period = sampling_period;

  const auto continuous = GatedBlindingPlan::make_continuous(
      trigger_rate, duration, p_blinding, e_pulse, ctx.pulse_fwhm);
  const auto gated =
      GatedBlindingPlan::make_gated(trigger_rate, duration, p_blinding,
                                    e_pulse, on_lead, 0.0, ctx.pulse_fwhm);

  auto csv = open_out(ctx.out_dir / "gated_blinding.csv");
  csv << "plan,mean_current_a,n_clicks,slow_monitor_verdict\n";
  for (const auto* plan : {&continuous, &gated}) {
    const DetectorRun run = gated_blinding_run(*plan, ctx.params, ctx.seed);
    const AlarmReport report = mean_current_monitor(run, threshold, mon);
    csv << (plan == &continuous ? "continuous," : "gated,")
        << format_double(run.mean_current()) << ',' << run.clicks.size() << ','
        << to_string(report.verdict) << '\n';
    ctx.log << (plan == &continuous ? "continuous" : "gated") << ": mean current "
            << run.mean_current() * 1e9 << " nA, " << report.summary();
  }
}

void run_bb84(Context& ctx) {
  const auto powers =
      resolve_list(ctx.cfg, ctx.resolved, "bb84.blinding_powers", {1e-6});
  const double epsilon =
      resolve_double(ctx.cfg, ctx.resolved, "bb84.epsilon", 0.005);
  const long trials = resolve_long(ctx.cfg, ctx.resolved, "bb84.trials", 3000);
  const long n_rounds =
      resolve_long(ctx.cfg, ctx.resolved, "bb84.n_rounds", 100000);
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "bb84.trigger_rate", 40e3);
  // 0 picks the log-midpoint of each feasible window (or just above
  // E_always when there is none).
  const double e_override =
      resolve_double(ctx.cfg, ctx.resolved, "bb84.e_pulse", 0.0);

  auto csv = open_out(ctx.out_dir / "bb84.csv");
  csv << "p_blinding_w,e_pulse_j,e_never_j,e_always_j,feasible,"
         "bob_click_rate,qber_contribution,double_click_rate,"
         "basis_match_fraction\n";
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    const double p_blinding = powers[pi];
    const ThresholdEstimate est = estimate_thresholds(
        p_blinding, ctx.params, epsilon, trials,
        splitmix64(ctx.seed ^ (3 + pi)), trigger_rate);
    const bool feasible = est.e_always < 2.0 * est.e_never;
    const double e_pulse =
        e_override > 0.0 ? e_override
        : feasible       ? std::sqrt(est.e_always * 2.0 * est.e_never)
                         : est.e_always * 1.05;

    Bb84AttackConfig config;
    config.e_pulse = e_pulse;
    config.trigger_rate = trigger_rate;
    config.n_rounds = n_rounds;
    config.e_never = est.e_never;
    config.e_always = est.e_always;
    config.rng_seed = ctx.seed;
    const Bb84Stats stats = run_bb84_attack(config, ctx.params, p_blinding,
                                            splitmix64(ctx.seed ^ (100 + pi)));

    csv << format_double(p_blinding) << ',' << format_double(e_pulse) << ','
        << format_double(est.e_never) << ',' << format_double(est.e_always)
        << ',' << (feasible ? 1 : 0) << ','
        << format_double(stats.bob_click_rate) << ','
        << format_double(stats.qber_contribution) << ','
        << format_double(stats.double_click_rate) << ','
        << format_double(stats.basis_match_fraction) << '\n';
    ctx.log << "bb84 @ " << format_double(p_blinding) << " W: click rate "
            << stats.bob_click_rate << ", qber " << stats.qber_contribution
            << ", doubles " << stats.double_click_rate
            << (feasible ? " (feasible window)" : " (no feasible window)")
            << "\n";
  }
}

void run_fast_monitor(Context& ctx) {
  const double duration =
      resolve_double(ctx.cfg, ctx.resolved, "fast_monitor.duration", 0.02);
  const double drop_threshold = resolve_double(
      ctx.cfg, ctx.resolved, "fast_monitor.drop_threshold", 0.5e-3);
  const double min_duration = resolve_double(
      ctx.cfg, ctx.resolved, "fast_monitor.min_duration", 0.2e-6);
  const double trigger_rate =
      resolve_double(ctx.cfg, ctx.resolved, "fast_monitor.trigger_rate", 40e3);
  const double p_min = min_blinding_power(ctx.params);
  const double p_blinding = resolve_double(
      ctx.cfg, ctx.resolved, "fast_monitor.blinding_power", 1.2 * p_min);
  const double e_pulse =
      resolve_double(ctx.cfg, ctx.resolved, "fast_monitor.e_pulse",
                     4.0 * transition_center(ctx.params, p_blinding));
  const double on_lead =
      resolve_double(ctx.cfg, ctx.resolved, "fast_monitor.on_lead", 0.7e-6);
  const double photon_rate = resolve_double(
      ctx.cfg, ctx.resolved, "fast_monitor.clean_photon_rate", 1e6);
  const bool write_trace = ctx.cfg.get_bool("fast_monitor.write_trace", false);
  ctx.resolved.set("fast_monitor.write_trace", write_trace ? "true" : "false");

  MonitorConfig mon;

  auto csv = open_out(ctx.out_dir / "fast_monitor.csv");
  csv << "scenario,verdict,n_alarms,n_compromised_clicks\n";
  auto alarms_csv = open_out(ctx.out_dir / "fast_monitor_alarms.csv");
  alarms_csv << "scenario,t_start_s,t_end_s,peak_deviation_v\n";

  auto evaluate = [&](const std::string& label, const DetectorRun& run) {
    const MonitorTrace trace = bias_voltage_trace(run, mon);
    const AlarmReport report =
        fast_blinding_detector(trace, drop_threshold, min_duration);
    csv << label << ',' << to_string(report.verdict) << ','
        << report.alarms.size() << ',' << report.compromised_clicks.size()
        << '\n';
    for (const auto& a : report.alarms) {
      alarms_csv << label << ',' << format_double(a.t_start) << ','
                 << format_double(a.t_end) << ','
                 << format_double(a.peak_deviation) << '\n';
    }
    if (write_trace) {
      auto trace_csv =
          open_out(ctx.out_dir / ("fast_monitor_trace_" + label + ".csv"));
      write_trace_csv(trace, trace_csv);
    }
    ctx.log << label << ": " << report.summary();
  };

  OpticalScenario clean;
  clean.photon_rate = photon_rate;
  clean.duration = duration;
  clean.rng_seed = ctx.seed;
  evaluate("clean", simulate(clean, ctx.params, ctx.seed));

  OpticalScenario continuous;
  continuous.cw.push_back({0.0, duration, p_blinding});
  continuous.duration = duration;
  continuous.rng_seed = splitmix64(ctx.seed ^ 5);
  evaluate("continuous", simulate(continuous, ctx.params, continuous.rng_seed));

  const auto plan = GatedBlindingPlan::make_gated(
      trigger_rate, duration, p_blinding, e_pulse, on_lead, 0.0, ctx.pulse_fwhm);
  evaluate("gated",
           gated_blinding_run(plan, ctx.params, splitmix64(ctx.seed ^ 6)));
}

} // namespace

int run_experiment(const ConfigFile& cfg, std::ostream& log) {
  ExperimentKind kind;
  try {
    const std::string name = cfg.get_string("experiment", "");
    if (name.empty()) {
      log << "error: no experiment selected\n";
      return kUsageError;
    }
    kind = experiment_from_string(name);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kUsageError;
  }

  DetectorPreset preset;
  try {
    preset = detector_preset(cfg.get_string("preset", "d2"));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kUnknownPreset;
  }

  try {
    ConfigFile resolved;
    resolved.set("experiment", to_string(kind));
    resolved.set("preset", preset.name);
    const std::uint64_t seed = cfg.get_seed("seed", 1);
    resolved.set("seed", std::to_string(seed));
    const std::string out_dir = cfg.get_string("output", "out");
    resolved.set("output", out_dir);

    NfadParams params = preset.params;
    apply_detector_overrides(params, cfg);
    params.validate();
    write_detector_section(resolved, params);

    Context ctx{cfg, resolved, params,
                cfg.get_double("pulse_fwhm", preset.pulse_fwhm), seed,
                fs::path(out_dir), log};
    resolved.set("pulse_fwhm", format_double(ctx.pulse_fwhm));

    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    switch (kind) {
      case ExperimentKind::ClickCurve: run_click_curve(ctx); break;
      case ExperimentKind::ThresholdMap: run_threshold_map(ctx); break;
      case ExperimentKind::Jitter: run_jitter(ctx); break;
      case ExperimentKind::CountRateSweep: run_count_rate_sweep(ctx); break;
      case ExperimentKind::TableCurrents: run_table_currents(ctx); break;
      case ExperimentKind::GatedBlinding: run_gated_blinding(ctx); break;
      case ExperimentKind::Bb84: run_bb84(ctx); break;
      case ExperimentKind::FastMonitor: run_fast_monitor(ctx); break;
    }

    auto manifest = open_out(ctx.out_dir / (to_string(kind) + ".manifest"));
    manifest << resolved.serialize();
    log << "manifest: " << (ctx.out_dir / (to_string(kind) + ".manifest")).string()
        << "\n";
    return kOk;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    log << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInvalidParameter;
  }
}

} // namespace nfadsim

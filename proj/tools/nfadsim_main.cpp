#include "nfadsim/config.hpp"
#include "nfadsim/experiments.hpp"
#include "nfadsim/presets.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{
      "nfadsim - circuit-level simulator of NFAD single-photon detectors "
      "under bright-light blinding and control attacks"};

  std::string config_path, experiment, preset, output;
  std::string seed_str;
  bool verbose = false;
  bool list_presets = false;
  app.add_option("-c,--config", config_path,
                 "experiment config file (key = value with [sections])");
  app.add_option("-e,--experiment", experiment,
                 "experiment: click_curve | threshold_map | jitter | "
                 "count_rate_sweep | table_currents | gated_blinding | bb84 | "
                 "fast_monitor");
  app.add_option("-p,--preset", preset, "detector preset (d1..d4)");
  app.add_option("-o,--output", output, "output directory");
  app.add_option("-s,--seed", seed_str, "RNG seed override");
  app.add_flag("-v,--verbose", verbose, "chattier progress output");
  app.add_flag("--list-presets", list_presets, "list detector presets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? nfadsim::kUsageError : nfadsim::kOk;
  }

  if (list_presets) {
    for (const auto& name : nfadsim::preset_names()) std::cout << name << "\n";
    return nfadsim::kOk;
  }

  nfadsim::ConfigFile cfg;
  if (!config_path.empty()) {
    try {
      cfg = nfadsim::ConfigFile::parse_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return nfadsim::kConfigParseError;
    }
  }
  // Command line overrides the file.
  if (!experiment.empty()) cfg.set("experiment", experiment);
  if (!preset.empty()) cfg.set("preset", preset);
  if (!output.empty()) cfg.set("output", output);
  if (!seed_str.empty()) cfg.set("seed", seed_str);

  if (verbose) return nfadsim::run_experiment(cfg, std::cerr);
  std::ostringstream quiet;
  const int rc = nfadsim::run_experiment(cfg, quiet);
  if (rc != nfadsim::kOk) std::cerr << quiet.str();
  return rc;
}

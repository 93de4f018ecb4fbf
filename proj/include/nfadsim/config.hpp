#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nfadsim {

/// Flat key = value configuration with [section] headers. '#' and ';' start
/// comments, whitespace is trimmed, keys are stored as "section.key"
/// (top-level keys have no dot). Parsing is line-oriented; a malformed line
/// throws std::invalid_argument with its line number.
class ConfigFile {
public:
  ConfigFile() = default;

  static ConfigFile parse(const std::string& text);
  static ConfigFile parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of doubles.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);

  /// Keys in first-seen order (sections grouped as written).
  const std::vector<std::string>& keys() const { return order_; }

  /// Serializes back to the same grammar, grouped by section.
  std::string serialize() const;

private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

enum class ExperimentKind {
  ClickCurve,
  ThresholdMap,
  Jitter,
  CountRateSweep,
  TableCurrents,
  GatedBlinding,
  Bb84,
  FastMonitor
};

ExperimentKind experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// One-to-one mapping between optical scenarios and a config section:
//   [scenario]
//   duration = 0.01
//   photon_rate = 1e6
//   seed = 7
//   cw = t_start:t_end:power, ...
//   pulses = t_peak:energy:fwhm, ...
struct OpticalScenario;

OpticalScenario scenario_from_config(const ConfigFile& cfg,
                                     const std::string& section = "scenario");
void scenario_to_config(const OpticalScenario& scenario, ConfigFile& cfg,
                        const std::string& section = "scenario");

} // namespace nfadsim

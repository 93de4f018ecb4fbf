#include "nfadsim/config.hpp"

#include "nfadsim/io.hpp"
#include "nfadsim/optics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nfadsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_key(section)) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": bad section name");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": bad key name");
    }
    cfg.set(section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool ConfigFile::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::invalid_argument("config value for " + key + " is not a number");
  }
  return v;
}

long ConfigFile::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = get_double(key, 0.0);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) {
    throw std::invalid_argument("config value for " + key +
                                " is not an integer");
  }
  return l;
}

std::uint64_t ConfigFile::get_seed(const std::string& key,
                                   std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::invalid_argument("config value for " + key + " is not a seed");
  }
  return static_cast<std::uint64_t>(v);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config value for " + key + " is not a bool");
}

std::vector<double> ConfigFile::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = trim(item);
    if (v.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(v, &pos));
    if (pos != v.size()) {
      throw std::invalid_argument("config list " + key + " has a bad entry: " + v);
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("config list " + key + " is empty");
  }
  return out;
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  if (values_.insert_or_assign(key, value).second) {
    order_.push_back(key);
  }
}

std::string ConfigFile::serialize() const {
  std::ostringstream os;
  // Top-level keys first, then sections grouped in first-seen order.
  for (const auto& k : order_) {
    if (k.find('.') == std::string::npos) {
      os << k << " = " << values_.at(k) << "\n";
    }
  }
  std::vector<std::string> sections;
  for (const auto& k : order_) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) continue;
    const std::string sec = k.substr(0, dot);
    if (std::find(sections.begin(), sections.end(), sec) == sections.end()) {
      sections.push_back(sec);
    }
  }
  for (const auto& sec : sections) {
    os << "\n[" << sec << "]\n";
    for (const auto& k : order_) {
      if (k.size() > sec.size() && k.compare(0, sec.size(), sec) == 0 &&
          k[sec.size()] == '.') {
        os << k.substr(sec.size() + 1) << " = " << values_.at(k) << "\n";
      }
    }
  }
  return os.str();
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "click_curve") return ExperimentKind::ClickCurve;
  if (name == "threshold_map") return ExperimentKind::ThresholdMap;
  if (name == "jitter") return ExperimentKind::Jitter;
  if (name == "count_rate_sweep") return ExperimentKind::CountRateSweep;
  if (name == "table_currents") return ExperimentKind::TableCurrents;
  if (name == "gated_blinding") return ExperimentKind::GatedBlinding;
  if (name == "bb84") return ExperimentKind::Bb84;
  if (name == "fast_monitor") return ExperimentKind::FastMonitor;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ClickCurve: return "click_curve";
    case ExperimentKind::ThresholdMap: return "threshold_map";
    case ExperimentKind::Jitter: return "jitter";
    case ExperimentKind::CountRateSweep: return "count_rate_sweep";
    case ExperimentKind::TableCurrents: return "table_currents";
    case ExperimentKind::GatedBlinding: return "gated_blinding";
    case ExperimentKind::Bb84: return "bb84";
    case ExperimentKind::FastMonitor: return "fast_monitor";
  }
  return "?";
}

namespace {

// "a:b:c, a:b:c, ..." -> rows of exactly three doubles.
std::vector<std::array<double, 3>> parse_triples(const std::string& text,
                                                 const std::string& what) {
  std::vector<std::array<double, 3>> rows;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (trim(item).empty()) continue;
    std::array<double, 3> row{};
    std::stringstream fields(item);
    std::string field;
    int i = 0;
    while (std::getline(fields, field, ':')) {
      if (i >= 3) break;
      row[i++] = std::stod(trim(field));
    }
    if (i != 3) {
      throw std::invalid_argument(what + ": expected t:v:w triples");
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace

OpticalScenario scenario_from_config(const ConfigFile& cfg,
                                     const std::string& section) {
  OpticalScenario sc;
  sc.duration = cfg.get_double(section + ".duration", 0.0);
  sc.photon_rate = cfg.get_double(section + ".photon_rate", 0.0);
  sc.rng_seed = cfg.get_seed(section + ".seed", 0);
  for (const auto& row :
       parse_triples(cfg.get_string(section + ".cw", ""), section + ".cw")) {
    sc.cw.push_back({row[0], row[1], row[2]});
  }
  for (const auto& row : parse_triples(cfg.get_string(section + ".pulses", ""),
                                       section + ".pulses")) {
    sc.pulses.push_back({row[0], row[1], row[2]});
  }
  sc.validate_and_normalize();
  return sc;
}

void scenario_to_config(const OpticalScenario& scenario, ConfigFile& cfg,
                        const std::string& section) {
  cfg.set(section + ".duration", format_double(scenario.duration));
  cfg.set(section + ".photon_rate", format_double(scenario.photon_rate));
  cfg.set(section + ".seed", std::to_string(scenario.rng_seed));
  auto join = [](auto&& items, auto&& proj) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += proj(items[i]);
    }
    return out;
  };
  cfg.set(section + ".cw", join(scenario.cw, [](const CwSegment& s) {
            return format_double(s.t_start) + ":" + format_double(s.t_end) +
                   ":" + format_double(s.power);
          }));
  cfg.set(section + ".pulses", join(scenario.pulses, [](const TriggerPulse& p) {
            return format_double(p.t_peak) + ":" + format_double(p.energy) +
                   ":" + format_double(p.fwhm);
          }));
}

} // namespace nfadsim

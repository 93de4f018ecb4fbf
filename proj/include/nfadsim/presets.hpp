#pragma once

#include "nfadsim/params.hpp"

#include <string>
#include <vector>

namespace nfadsim {

/// Named detector configuration: the parameter set plus the trigger-pulse
/// width its experiments default to.
struct DetectorPreset {
  std::string name;
  NfadParams params;
  double pulse_fwhm = 33e-12;
};

/// Presets d1..d4. d1/d2 model the capacitive-readout channels (22/32 um),
/// d3/d4 the inductive-readout ones. Throws std::invalid_argument for an
/// unknown name.
DetectorPreset detector_preset(const std::string& name);

std::vector<std::string> preset_names();

/// Applies one of the calibrated efficiency settings of the capacitive
/// readout: 10% <-> 1.3 V excess bias, 20% <-> 4.1 V. Other efficiencies
/// have no calibrated bias point and are rejected.
void apply_efficiency_setting(NfadParams& params, double efficiency);

} // namespace nfadsim

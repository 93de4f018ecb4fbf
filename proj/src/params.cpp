#include "nfadsim/params.hpp"

#include <stdexcept>
#include <string>

namespace nfadsim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("NfadParams: " + what);
}

} // namespace

void NfadParams::validate() const {
  require(v_br > 0.0, "v_br must be positive");
  require(v_excess > 0.0, "v_excess must be positive");
  require(r_integrated > 0.0 && r1 > 0.0 && r2 > 0.0,
          "all resistances must be positive");
  require(v_quench < v_br + v_excess,
          "v_quench must stay below V_bias (quenching must not reverse polarity)");
  require(v_quench >= 0.0, "v_quench must be nonnegative");
  require(v_th > 0.0, "v_th must be positive");
  require(tau_d > 0.0, "tau_d must be positive");
  require(responsivity > 0.0, "responsivity must be positive");
  require(gain_exponent > 0.0, "gain_exponent must be positive");
  require(gain_order > 0.0, "gain_order must be positive");
  require(geiger_margin > 0.0 && geiger_margin < v_br,
          "geiger_margin must lie in (0, v_br)");
  require(amp_transimpedance > 0.0, "amp_transimpedance must be positive");
  require(noise_sigma > 0.0, "noise_sigma must be positive");
  require(sp_jitter_fwhm >= 0.0 && electronics_jitter_fwhm >= 0.0,
          "jitter FWHMs must be nonnegative");
  require(efficiency >= 0.0 && efficiency <= 1.0,
          "efficiency must lie in [0, 1]");
  require(active_diameter > 0.0, "active_diameter must be positive");
  require(dark_count_rate >= 0.0, "dark_count_rate must be nonnegative");
  require(avalanche_charge >= 0.0, "avalanche_charge must be nonnegative");
  require(geiger_amplitude > v_th,
          "geiger_amplitude must exceed v_th (a Geiger pulse always registers)");
}

std::string to_string(ApdMode mode) {
  switch (mode) {
    case ApdMode::Geiger: return "geiger";
    case ApdMode::Linear: return "linear";
    case ApdMode::Quenched: return "quenched";
  }
  return "?";
}

} // namespace nfadsim

#pragma once

#include "nfadsim/attack.hpp"

#include <cstdint>
#include <vector>

namespace nfadsim {

struct Bb84AttackConfig {
  double e_pulse = 0.0;      ///< faked-state pulse energy, joules
  double trigger_rate = 40e3; ///< must stay below 1/tau_d
  long n_rounds = 0;
  double e_never = 0.0;      ///< threshold-map entry the energy was chosen from
  double e_always = 0.0;
  std::uint64_t rng_seed = 0;
};

struct Bb84Stats {
  double bob_click_rate = 0.0;      ///< rounds with at least one click / rounds
  double qber_contribution = 0.0;   ///< erroneous sifted bits / sifted bits
  double double_click_rate = 0.0;   ///< rounds with both detectors clicking / rounds
  double basis_match_fraction = 0.0; ///< Eve-Bob basis coincidences / rounds
  long n_rounds = 0;
  long n_sifted = 0;
  long n_errors = 0;
  long n_double = 0;
};

/// Faked-state attack accounting against a two-detector BB84 receiver with
/// both detectors blinded at p_blinding.
///
/// Per round, Alice's bit/basis and Eve's measurement basis are drawn
/// uniformly; Eve resends a bright pulse encoding her result. When Bob's
/// basis matches Eve's, the full pulse lands on the detector for Eve's bit;
/// otherwise each detector receives e_pulse/2. Click decisions use the
/// blinded operating point's click probability with independent comparator
/// noise per detector. Sifting keeps single-click rounds where Bob's basis
/// matches Alice's; a kept bit differing from Alice's counts as an error.
Bb84Stats run_bb84_attack(const Bb84AttackConfig& config,
                          const NfadParams& params, double p_blinding,
                          std::uint64_t seed);

struct FeasibilityEntry {
  double p_blinding = 0.0;
  bool feasible = false;  ///< e_always < 2 * e_never
  double window_lo = 0.0; ///< admissible energy interval (e_always, 2*e_never)
  double window_hi = 0.0;
};

/// Per-entry BB84 attack feasibility: Eve needs a pulse energy that always
/// clicks on a basis match yet never clicks at half energy, i.e.
/// e_always < e_pulse < 2 * e_never.
std::vector<FeasibilityEntry> attack_feasibility(const ThresholdMap& map);

} // namespace nfadsim

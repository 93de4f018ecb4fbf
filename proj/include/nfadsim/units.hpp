#pragma once

namespace nfadsim {

inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr double kSpeedOfLight = 2.99792458e8;      // m/s
inline constexpr double kElectronCharge = 1.602176634e-19; // C

/// Energy of a single 1550 nm photon (J). All pulse energies are referred
/// to this wavelength when converting to photon numbers.
inline constexpr double kPhotonEnergy1550 =
    kPlanck * kSpeedOfLight / 1550e-9;

/// FWHM of a Gaussian = 2*sqrt(2*ln 2) * sigma.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

constexpr double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }
constexpr double sigma_to_fwhm(double sigma) { return sigma * kFwhmPerSigma; }

} // namespace nfadsim

#pragma once

namespace vibroq::units {

// CODATA 2018. Canonical internal units: energies in eV, rates in 1/ps,
// times in ps (reports print fs where conventional).
inline constexpr double hbar_ev_ps = 6.582119569e-4;   // eV*ps
inline constexpr double kb_ev_per_k = 8.617333262e-5;  // eV/K
inline constexpr double cm1_per_ev = 8065.543937;      // cm^-1 per eV

enum class Unit { Ev, WavenumberCm1, AngularPsInv, Kelvin };

/// Bose-Einstein occupation 1/(exp(E/kT) - 1). Exactly zero at T = 0.
/// Throws std::domain_error for non-positive energy, std::invalid_argument
/// for negative temperature.
double bose_occupation(double energy_ev, double temperature_k);

/// Linear conversion between eV, wavenumbers, angular frequency (rad/ps) and
/// temperature-as-energy (K).
double convert(double value, Unit from, Unit to);

}

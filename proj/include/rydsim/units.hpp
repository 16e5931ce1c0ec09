#pragma once

#include <cmath>

// Internal unit system: lengths in micrometers, time in units of the pulse
// duration tau (so tau == 1 internally), frequencies/energies in rad per tau
// (hbar == 1). Physical inputs are converted here, at the configuration
// boundary, and nowhere else.
namespace rydsim::units {

inline constexpr double pi = 3.14159265358979323846;

// number density: cm^-3 -> um^-3
inline double density_um3(double per_cm3) { return per_cm3 * 1e-12; }

// sphere radius (um) holding n atoms at density rho (um^-3)
inline double radius_from_density(double n_atoms, double rho_um3) {
    return std::cbrt(3.0 * n_atoms / (4.0 * pi * rho_um3));
}

inline double density_from_radius(double n_atoms, double radius_um) {
    return 3.0 * n_atoms / (4.0 * pi * radius_um * radius_um * radius_um);
}

// dispersion coefficient: MHz*um^6 (ordinary frequency) at pulse duration
// tau_ns -> rad/tau * um^6
inline double c6_internal(double c6_mhz_um6, double tau_ns) {
    return 2.0 * pi * c6_mhz_um6 * 1e6 * tau_ns * 1e-9;
}

// Rabi frequency: MHz (ordinary) at tau_ns -> rad/tau
inline double rabi_internal(double omega_mhz, double tau_ns) {
    return 2.0 * pi * omega_mhz * 1e6 * tau_ns * 1e-9;
}

}  // namespace rydsim::units

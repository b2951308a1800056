#pragma once

namespace echospec {

inline constexpr double pi = 3.14159265358979323846;

// SI constants. Defaults are Rb-85 in a far-red-detuned dipole trap.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;      // J s
    double k_B = 1.380649e-23;          // J/K
    double gravity_g = 9.81;            // m/s^2
    double atom_mass = 84.911789738 * 1.66053906660e-27; // kg
    double omega_HF = 2.0 * pi * 3.036e9; // rad/s hyperfine splitting

    void validate() const; // throws ConfigError naming the offending field
};

// Internal unit system: length = w0, energy = U0, hbar = 1.
// One internal unit expressed in SI:
struct UnitScales {
    double length_m; // w0
    double energy_J; // U0
    double time_s;   // hbar/U0
    double mass_kg;  // hbar^2/(U0 w0^2)

    double to_internal_length(double m) const { return m / length_m; }
    double from_internal_length(double l) const { return l * length_m; }
    double to_internal_energy(double J) const { return J / energy_J; }
    double from_internal_energy(double e) const { return e * energy_J; }
    double to_internal_time(double s) const { return s / time_s; }
    double from_internal_time(double t) const { return t * time_s; }
    double to_internal_mass(double kg) const { return kg / mass_kg; }
    double from_internal_mass(double m) const { return m * mass_kg; }
    // angular frequency, rad/s <-> internal
    double to_internal_omega(double rad_s) const { return rad_s * time_s; }
    double from_internal_omega(double w) const { return w / time_s; }
};

struct TrapConfig; // config.hpp

// Internal scaling for a given trap: length -> w0, energy -> U0, time -> hbar/U0.
UnitScales natural_units(const PhysicalConstants& c, const TrapConfig& trap);

} // namespace echospec

#include "echospec/constants.hpp"

#include "echospec/config.hpp"
#include "echospec/errors.hpp"

namespace echospec {

void PhysicalConstants::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ConfigError(std::string("constants.") + name + " must be > 0");
    };
    positive(hbar, "hbar");
    positive(k_B, "k_B");
    positive(gravity_g, "gravity_g");
    positive(atom_mass, "atom_mass");
    positive(omega_HF, "omega_HF");
}

UnitScales natural_units(const PhysicalConstants& c, const TrapConfig& trap) {
    const double U0 = trap.depth_J(c);
    const double w0 = trap.waist_w0;
    UnitScales u;
    u.length_m = w0;
    u.energy_J = U0;
    u.time_s = c.hbar / U0;
    u.mass_kg = c.hbar * c.hbar / (U0 * w0 * w0);
    return u;
}

} // namespace echospec

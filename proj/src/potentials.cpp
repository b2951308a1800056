#include "echospec/potentials.hpp"

#include <cmath>

#include "echospec/errors.hpp"

namespace echospec {

namespace {
constexpr double c_light = 299792458.0;
constexpr double lambda_D1 = 795.0e-9;
constexpr double lambda_D2 = 780.0e-9;
} // namespace

Eigen::VectorXd AxisPotential::optical() const {
    Eigen::VectorXd v = values;
    if (tilt != 0.0)
        for (int i = 0; i < grid.n; ++i) v[i] -= tilt * grid.x(i);
    return v;
}

void AxisPotential::check_invariants() const {
    if (grid.n > 0) {
        if (!(grid.dx > 0.0)) throw NumericsError("axis grid must be strictly increasing");
        if (!values.allFinite()) throw NumericsError("axis potential has non-finite samples");
        if (kind == Kind::gaussian) {
            const double floor = -depth - std::abs(tilt) * grid.halfwidth();
            if (values.minCoeff() < floor - 1e-12)
                throw NumericsError("gaussian axis potential below physical floor");
        }
    }
}

double epsilon_from_wavelength(double lambda_m, const PhysicalConstants& c) {
    if (!(lambda_m > lambda_D1))
        throw ConfigError(
            "trap.wavelength_lambda must be red of the D1 line (> 795 nm) for this model");
    const double delta = 2.0 * pi * c_light * (1.0 / lambda_D1 - 1.0 / lambda_m);
    return c.omega_HF / delta;
}

double epsilon_from_wavelength_centroid(double lambda_m, const PhysicalConstants& c) {
    const double nu_c = c_light * (2.0 / lambda_D2 + 1.0 / lambda_D1) / 3.0;
    const double delta = 2.0 * pi * (nu_c - c_light / lambda_m);
    if (!(delta > 0.0))
        throw ConfigError("trap.wavelength_lambda must be red of the D-line centroid");
    return c.omega_HF / delta;
}

double resolve_epsilon(const TrapConfig& trap, const PhysicalConstants& c) {
    if (trap.epsilon_override) return *trap.epsilon_override;
    if (!trap.wavelength_lambda)
        throw ConfigError("trap.wavelength_lambda or trap.epsilon_override is required");
    if (trap.epsilon_model == "d_centroid")
        return epsilon_from_wavelength_centroid(*trap.wavelength_lambda, c);
    return epsilon_from_wavelength(*trap.wavelength_lambda, c);
}

PotentialPair build_pair(const TrapConfig& trap, const NumericsConfig& numerics,
                         const PhysicalConstants& c, std::optional<double> mass_override) {
    const UnitScales u = natural_units(c, trap);
    const double eps = resolve_epsilon(trap, c);
    const double mass = mass_override ? *mass_override : u.to_internal_mass(c.atom_mass);
    const double g_int =
        c.gravity_g * u.time_s * u.time_s / u.length_m; // acceleration, internal

    PotentialPair pair;
    pair.epsilon = eps;
    pair.mass = mass;
    pair.e_hf = c.omega_HF * u.time_s;
    if (trap.tau_osc_pin)
        pair.omega1_pin = 2.0 * pi / u.to_internal_time(*trap.tau_osc_pin);

    double hw;
    if (numerics.domain_halfwidth) {
        hw = u.to_internal_length(*numerics.domain_halfwidth);
    } else {
        // Heavy (physical-scale) masses have short tails; light reduced-scale
        // masses need a wider box to hold the upper bound states.
        hw = mass >= 1e5 ? 1.2 : 2.4;
    }
    const int npts = numerics.grid_points_per_axis;
    GridSpec grid{-hw, 2.0 * hw / (npts - 1), npts};

    std::vector<std::string> labels =
        numerics.dimensionality == 2 ? std::vector<std::string>{"x", "y"}
                                     : std::vector<std::string>{"y"};
    for (const auto& lab : labels) {
        const bool vertical = lab == "y";
        const double tilt = (vertical && trap.gravity_enabled) ? mass * g_int : 0.0;
        for (int branch = 1; branch <= 2; ++branch) {
            AxisPotential ax;
            ax.kind = AxisPotential::Kind::gaussian;
            ax.label = lab;
            ax.grid = grid;
            ax.mass = mass;
            ax.depth = branch == 1 ? 1.0 : 1.0 + eps;
            ax.tilt = tilt;
            ax.values.resize(npts);
            for (int i = 0; i < npts; ++i) {
                const double q = grid.x(i);
                ax.values[i] = -ax.depth * std::exp(-2.0 * q * q) + tilt * q;
            }
            ax.check_invariants();
            (branch == 1 ? pair.v1 : pair.v2).push_back(std::move(ax));
        }
    }
    return pair;
}

PotentialPair harmonic_surrogate(const PotentialPair& pair) {
    PotentialPair out;
    out.epsilon = pair.epsilon;
    out.e_hf = pair.e_hf;
    out.mass = pair.mass;
    out.omega1_pin = pair.omega1_pin;
    for (std::size_t a = 0; a < pair.v1.size(); ++a) {
        const AxisPotential& g1 = pair.v1[a];
        if (g1.kind != AxisPotential::Kind::gaussian)
            throw NumericsError("harmonic_surrogate expects a gaussian pair");
        const double w1 =
            pair.omega1_pin ? *pair.omega1_pin : std::sqrt(4.0 * g1.depth / (g1.mass * 1.0));
        const double w2 = w1 * std::sqrt(1.0 + pair.epsilon);
        for (int branch = 1; branch <= 2; ++branch) {
            const AxisPotential& src = branch == 1 ? pair.v1[a] : pair.v2[a];
            const double w = branch == 1 ? w1 : w2;
            AxisPotential ax;
            ax.kind = AxisPotential::Kind::harmonic;
            ax.label = src.label;
            ax.grid = src.grid;
            ax.mass = src.mass;
            ax.tilt = src.tilt;
            ax.omega = w;
            ax.center = src.tilt != 0.0 ? -src.tilt / (src.mass * w * w) : 0.0;
            ax.v0 = -src.depth - 0.5 * src.mass * w * w * ax.center * ax.center;
            if (ax.grid.n > 0) {
                ax.values.resize(ax.grid.n);
                for (int i = 0; i < ax.grid.n; ++i) {
                    const double q = ax.grid.x(i) - ax.center;
                    ax.values[i] = 0.5 * ax.mass * w * w * q * q + ax.v0;
                }
            }
            (branch == 1 ? out.v1 : out.v2).push_back(std::move(ax));
        }
    }
    return out;
}

} // namespace echospec

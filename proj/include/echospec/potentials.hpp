#pragma once
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "echospec/config.hpp"
#include "echospec/constants.hpp"

namespace echospec {

// Uniform spatial grid, internal length units (waist = 1).
struct GridSpec {
    double x0 = 0.0;
    double dx = 0.0;
    int n = 0;
    double x(int i) const { return x0 + i * dx; }
    double halfwidth() const { return -x0; }
    bool same_as(const GridSpec& o) const {
        return n == o.n && x0 == o.x0 && dx == o.dx;
    }
};

// One Cartesian axis of one branch, internal units.
struct AxisPotential {
    enum class Kind { gaussian, harmonic, custom };
    Kind kind = Kind::gaussian;
    std::string label;     // "x" or "y" ("y" is the vertical axis)
    GridSpec grid;
    Eigen::VectorXd values; // total potential on grid (optical + gravity)
    double mass = 0.0;     // internal particle mass

    // analytic parameters
    double depth = 1.0;    // gaussian: U0 (branch 2 carries (1+eps))
    double tilt = 0.0;     // linear term m*g (vertical axis, gravity on)
    double omega = 0.0;    // harmonic
    double center = 0.0;   // harmonic minimum position
    double v0 = 0.0;       // harmonic constant offset

    // optical part only (gravity removed)
    Eigen::VectorXd optical() const;
    void check_invariants() const;
};

struct PotentialPair {
    std::vector<AxisPotential> v1, v2; // same axis order, shared grids
    double epsilon = 0.0;
    double e_hf = 0.0;                 // internal energy offset of branch 2
    double mass = 0.0;                 // internal
    std::optional<double> omega1_pin;  // internal angular frequency, if pinned
};

// eps = omega_HF/delta with delta = 2 pi c (1/lambda_D1 - 1/lambda), lambda_D1 = 795 nm.
// Red detuning only (lambda > lambda_D1); throws ConfigError otherwise.
double epsilon_from_wavelength(double lambda_m, const PhysicalConstants& c);

// Alternative detuning reference at the D-line centroid
// nu_c = c (2/lambda_D2 + 1/lambda_D1)/3 with lambda_D2 = 780 nm.
double epsilon_from_wavelength_centroid(double lambda_m, const PhysicalConstants& c);

// Resolve eps for a trap config: override > wavelength via trap.epsilon_model.
double resolve_epsilon(const TrapConfig& trap, const PhysicalConstants& c);

// Gaussian dipole pair on per-axis grids, internal units. Axes: ["x","y"] for
// 2D, ["y"] for 1D; gravity acts on "y" when enabled. mass_override replaces
// the physical internal mass (reduced-scale runs).
PotentialPair build_pair(const TrapConfig& trap, const NumericsConfig& numerics,
                         const PhysicalConstants& c,
                         std::optional<double> mass_override = std::nullopt);

// Second-order expansion at the branch-1 optical minimum; gravity kept exact
// by completing the square. omega1 from the pin if present, else curvature.
PotentialPair harmonic_surrogate(const PotentialPair& pair);

} // namespace echospec

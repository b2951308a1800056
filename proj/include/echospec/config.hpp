#pragma once
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "echospec/constants.hpp"

namespace echospec {

// Trap and experiment parameters, SI units throughout.
struct TrapConfig {
    double waist_w0 = 50e-6;       // m, 1/e^2 intensity radius
    double depth_ratio = 1.5;      // U0/(k_B T); ignored when trap_depth_U0 given
    std::optional<double> trap_depth_U0;      // J
    std::optional<double> wavelength_lambda;  // m
    double temperature_T = 20e-6;  // K
    double clip_ratio = 1.5;       // ensemble clip in units of k_B T
    bool gravity_enabled = true;
    std::optional<double> epsilon_override;   // dimensionless
    std::string epsilon_model = "d1";         // "d1" | "d_centroid"
    std::optional<double> tau_osc_pin = 3.6e-3; // s; null -> curvature route

    double depth_J(const PhysicalConstants& c) const {
        return trap_depth_U0 ? *trap_depth_U0 : depth_ratio * c.k_B * temperature_T;
    }
    void validate(const PhysicalConstants& c) const;
};

struct NumericsConfig {
    int grid_points_per_axis = 1024;
    std::optional<double> domain_halfwidth;    // m; null -> auto by mass scale
    std::optional<double> basis_cutoff_energy; // J; null -> potential at domain edge
    int dimensionality = 2;
    int scan_parallelism = 0; // advisory; 0 = auto

    void validate() const;
};

// Everything a run needs, as loaded from one JSON file.
struct LoadedConfig {
    PhysicalConstants constants;
    TrapConfig trap;
    NumericsConfig numerics;
    nlohmann::ordered_json run; // preset-specific knobs, validated by the preset
};

// Parse + validate a JSON config file. Missing optional fields take defaults.
// Unknown keys and invariant violations raise ConfigError naming the field.
LoadedConfig load_config(const std::string& path);
LoadedConfig config_from_json(const nlohmann::ordered_json& j);

// Serialize back all physically meaningful fields (round-trips through
// config_from_json).
nlohmann::ordered_json config_to_json(const LoadedConfig& cfg);

} // namespace echospec

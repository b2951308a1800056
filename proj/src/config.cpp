#include "echospec/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "echospec/errors.hpp"

namespace echospec {

using json = nlohmann::ordered_json;

namespace {

constexpr double lambda_D1 = 795.0e-9;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError(field + " " + why);
}

void check_keys(const json& j, const std::string& section, std::set<std::string> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (allowed.find(it.key()) == allowed.end())
            fail(section + "." + it.key(), "is not a recognized field");
}

double get_num(const json& j, const std::string& section, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_number()) fail(section + "." + key, "must be a number");
    return v.get<double>();
}

std::optional<double> get_opt(const json& j, const std::string& section, const std::string& key,
                              std::optional<double> dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) fail(section + "." + key, "must be a number or null");
    return v.get<double>();
}

bool get_bool(const json& j, const std::string& section, const std::string& key, bool dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_boolean()) fail(section + "." + key, "must be a boolean");
    return v.get<bool>();
}

int get_int(const json& j, const std::string& section, const std::string& key, int dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) fail(section + "." + key, "must be an integer");
    return v.get<int>();
}

} // namespace

void TrapConfig::validate(const PhysicalConstants& c) const {
    if (!(waist_w0 > 0.0)) fail("trap.waist_w0", "must be > 0");
    if (!(temperature_T > 0.0)) fail("trap.temperature_T", "must be > 0");
    if (!(clip_ratio > 0.0)) fail("trap.clip_ratio", "must be > 0");
    if (!(depth_J(c) > 0.0))
        fail(trap_depth_U0 ? "trap.trap_depth_U0" : "trap.depth_ratio", "must yield depth > 0");
    if (epsilon_model != "d1" && epsilon_model != "d_centroid")
        fail("trap.epsilon_model", "must be \"d1\" or \"d_centroid\"");
    if (tau_osc_pin && !(*tau_osc_pin > 0.0)) fail("trap.tau_osc_pin", "must be > 0 or null");
    if (!epsilon_override && wavelength_lambda && !(*wavelength_lambda > lambda_D1))
        fail("trap.wavelength_lambda",
             "must be red of the D1 line (> 795 nm) unless epsilon_override is set");
    if (epsilon_override && !std::isfinite(*epsilon_override))
        fail("trap.epsilon_override", "must be finite");
}

void NumericsConfig::validate() const {
    if (grid_points_per_axis < 64) fail("numerics.grid_points_per_axis", "must be >= 64");
    if (domain_halfwidth && !(*domain_halfwidth > 0.0))
        fail("numerics.domain_halfwidth", "must be > 0 or null");
    if (dimensionality != 1 && dimensionality != 2)
        fail("numerics.dimensionality", "must be 1 or 2");
    if (scan_parallelism < 0) fail("numerics.scan_parallelism", "must be >= 0");
}

LoadedConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "config", {"constants", "trap", "numerics", "run"});

    LoadedConfig cfg;

    if (j.contains("constants")) {
        const json& c = j.at("constants");
        if (!c.is_object()) fail("constants", "must be an object");
        check_keys(c, "constants", {"hbar", "k_B", "gravity_g", "atom_mass", "omega_HF"});
        cfg.constants.hbar = get_num(c, "constants", "hbar", cfg.constants.hbar);
        cfg.constants.k_B = get_num(c, "constants", "k_B", cfg.constants.k_B);
        cfg.constants.gravity_g = get_num(c, "constants", "gravity_g", cfg.constants.gravity_g);
        cfg.constants.atom_mass = get_num(c, "constants", "atom_mass", cfg.constants.atom_mass);
        cfg.constants.omega_HF = get_num(c, "constants", "omega_HF", cfg.constants.omega_HF);
    }
    cfg.constants.validate();

    if (j.contains("trap")) {
        const json& t = j.at("trap");
        if (!t.is_object()) fail("trap", "must be an object");
        check_keys(t, "trap",
                   {"waist_w0", "depth_ratio", "trap_depth_U0", "wavelength_lambda",
                    "temperature_T", "clip_ratio", "gravity_enabled", "epsilon_override",
                    "epsilon_model", "tau_osc_pin"});
        TrapConfig& tc = cfg.trap;
        tc.waist_w0 = get_num(t, "trap", "waist_w0", tc.waist_w0);
        tc.depth_ratio = get_num(t, "trap", "depth_ratio", tc.depth_ratio);
        tc.trap_depth_U0 = get_opt(t, "trap", "trap_depth_U0", tc.trap_depth_U0);
        tc.wavelength_lambda = get_opt(t, "trap", "wavelength_lambda", tc.wavelength_lambda);
        tc.temperature_T = get_num(t, "trap", "temperature_T", tc.temperature_T);
        tc.clip_ratio = get_num(t, "trap", "clip_ratio", tc.clip_ratio);
        tc.gravity_enabled = get_bool(t, "trap", "gravity_enabled", tc.gravity_enabled);
        tc.epsilon_override = get_opt(t, "trap", "epsilon_override", tc.epsilon_override);
        if (t.contains("epsilon_model")) {
            if (!t.at("epsilon_model").is_string()) fail("trap.epsilon_model", "must be a string");
            tc.epsilon_model = t.at("epsilon_model").get<std::string>();
        }
        tc.tau_osc_pin = get_opt(t, "trap", "tau_osc_pin", tc.tau_osc_pin);
    }
    cfg.trap.validate(cfg.constants);

    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        if (!n.is_object()) fail("numerics", "must be an object");
        check_keys(n, "numerics",
                   {"grid_points_per_axis", "domain_halfwidth", "basis_cutoff_energy",
                    "dimensionality", "scan_parallelism"});
        NumericsConfig& nc = cfg.numerics;
        nc.grid_points_per_axis =
            get_int(n, "numerics", "grid_points_per_axis", nc.grid_points_per_axis);
        nc.domain_halfwidth = get_opt(n, "numerics", "domain_halfwidth", nc.domain_halfwidth);
        nc.basis_cutoff_energy =
            get_opt(n, "numerics", "basis_cutoff_energy", nc.basis_cutoff_energy);
        nc.dimensionality = get_int(n, "numerics", "dimensionality", nc.dimensionality);
        nc.scan_parallelism = get_int(n, "numerics", "scan_parallelism", nc.scan_parallelism);
    }
    cfg.numerics.validate();

    if (j.contains("run")) {
        if (!j.at("run").is_object()) fail("run", "must be an object");
        cfg.run = j.at("run");
    } else {
        cfg.run = json::object();
    }
    return cfg;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const LoadedConfig& cfg) {
    json j;
    j["constants"] = {
        {"hbar", cfg.constants.hbar},
        {"k_B", cfg.constants.k_B},
        {"gravity_g", cfg.constants.gravity_g},
        {"atom_mass", cfg.constants.atom_mass},
        {"omega_HF", cfg.constants.omega_HF},
    };
    json t;
    t["waist_w0"] = cfg.trap.waist_w0;
    t["depth_ratio"] = cfg.trap.depth_ratio;
    t["trap_depth_U0"] = cfg.trap.trap_depth_U0 ? json(*cfg.trap.trap_depth_U0) : json(nullptr);
    t["wavelength_lambda"] =
        cfg.trap.wavelength_lambda ? json(*cfg.trap.wavelength_lambda) : json(nullptr);
    t["temperature_T"] = cfg.trap.temperature_T;
    t["clip_ratio"] = cfg.trap.clip_ratio;
    t["gravity_enabled"] = cfg.trap.gravity_enabled;
    t["epsilon_override"] =
        cfg.trap.epsilon_override ? json(*cfg.trap.epsilon_override) : json(nullptr);
    t["epsilon_model"] = cfg.trap.epsilon_model;
    t["tau_osc_pin"] = cfg.trap.tau_osc_pin ? json(*cfg.trap.tau_osc_pin) : json(nullptr);
    j["trap"] = t;
    json n;
    n["grid_points_per_axis"] = cfg.numerics.grid_points_per_axis;
    n["domain_halfwidth"] =
        cfg.numerics.domain_halfwidth ? json(*cfg.numerics.domain_halfwidth) : json(nullptr);
    n["basis_cutoff_energy"] =
        cfg.numerics.basis_cutoff_energy ? json(*cfg.numerics.basis_cutoff_energy) : json(nullptr);
    n["dimensionality"] = cfg.numerics.dimensionality;
    n["scan_parallelism"] = cfg.numerics.scan_parallelism;
    j["numerics"] = n;
    j["run"] = cfg.run;
    return j;
}

} // namespace echospec

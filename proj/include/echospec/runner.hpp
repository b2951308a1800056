#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace echospec {

inline constexpr const char* code_version = "1.0.0";

struct RunOptions {
    std::string preset;
    std::string config_path; // empty -> built-in defaults for the preset
    std::string out_dir = ".";
    int threads = 0;         // 0 -> numerics.scan_parallelism, else 1
    std::uint64_t seed = 0;
    bool full = false;       // full-scale regime where the preset defines one
    bool plot = false;       // also write SVG plots
};

const std::vector<std::string>& preset_names();

// Runs one preset and writes its artifacts (CSV + meta.json, optionally SVG)
// into out_dir; returns the artifact file names. Throws ConfigError /
// NumericsError; partially written artifacts are removed before the
// exception propagates.
std::vector<std::string> run_preset(const RunOptions& opt);

} // namespace echospec

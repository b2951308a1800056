#pragma once
#include <stdexcept>
#include <string>

namespace echospec {

// Bad or inconsistent user input (config file, CLI arguments). CLI exit 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical validity violations detected at runtime. CLI exit 3.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace echospec

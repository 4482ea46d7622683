#pragma once

#include <stdexcept>
#include <string>

namespace crowddiff {

// Bad arguments to a library operation (dimension mismatch, non-finite input, ...).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometric preconditions violated (agent outside corridor, coincident points, ...).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario file problems; carries key/line context in the message.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crowddiff

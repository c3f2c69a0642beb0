#pragma once

#include <stdexcept>
#include <string>

namespace tabf {

// Bad experiment configuration (unknown key, missing section, wrong type).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver ran out of iterations.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A time integrator produced an unusable state (blow-up, negative density).
struct IntegratorError : std::runtime_error {
    explicit IntegratorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tabf

#pragma once

#include <stdexcept>
#include <string>

namespace lensehg {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// An evaluation point landed inside the guard band around a pole or zero
// of one of the infinite products.
struct pole_error : error {
    explicit pole_error(const std::string& msg) : error(msg) {}
};

// A requested contour violates the strip conditions that keep all
// integrand singularities away from it.
struct contour_error : error {
    explicit contour_error(const std::string& msg) : error(msg) {}
};

// Invalid parameters: bad modular data, size mismatches, broken balancing.
struct config_error : error {
    explicit config_error(const std::string& msg) : error(msg) {}
};

// A random-search routine exhausted its retry budget.
struct sampler_error : error {
    explicit sampler_error(const std::string& msg) : error(msg) {}
};

// An iterative scheme hit its index cap before reaching the target
// accuracy.
struct convergence_error : error {
    explicit convergence_error(const std::string& msg) : error(msg) {}
};

} // namespace lensehg

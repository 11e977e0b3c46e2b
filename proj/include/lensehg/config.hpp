#pragma once

#include <cstdlib>
#include <string>
#include <thread>

#include "lensehg/errors.hpp"

namespace lensehg {

// Knobs shared by the product evaluators and the quadrature driver.
// Defaults are tuned for ~1e-10 end-to-end accuracy in the standard
// test regime (imaginary parts of the modular parameters in [0.1, 0.5]).
struct NumericsConfig {
    double product_tol = 1e-14;   // truncation target for infinite products
    int product_max_index = 400;  // cap on product shell index
    double quad_tol = 1e-9;       // relative node-doubling stop criterion
    int quad_start_nodes = 32;    // first grid size per axis
    int quad_max_nodes = 4096;    // node cap per axis
    double pole_guard = 1e-3;     // min distance (in units of the period)
                                  // tolerated between an evaluation point
                                  // and a product pole/zero

    void validate() const {
        if (!(product_tol > 0.0) || !(quad_tol > 0.0))
            throw config_error("NumericsConfig: tolerances must be positive");
        if (product_max_index < 1)
            throw config_error("NumericsConfig: product_max_index must be >= 1");
        if (quad_start_nodes < 2 || quad_max_nodes < quad_start_nodes)
            throw config_error("NumericsConfig: bad quadrature node bounds");
        if (!(pole_guard > 0.0) || pole_guard >= 0.5)
            throw config_error("NumericsConfig: pole_guard must be in (0, 0.5)");
    }
};

// Worker count for the quadrature loops. 0 or unset environment variable
// LENS_EHG_THREADS means "ask the hardware".
inline int thread_count() {
    int n = 0;
    if (const char* env = std::getenv("LENS_EHG_THREADS")) {
        try {
            n = std::stoi(env);
        } catch (...) {
            throw config_error("LENS_EHG_THREADS must be an integer");
        }
        if (n < 0) throw config_error("LENS_EHG_THREADS must be >= 0");
    }
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw ? static_cast<int>(hw) : 1;
    }
    return n;
}

} // namespace lensehg

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "lensehg/errors.hpp"

namespace lensehg {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi_v<double>;
inline const cplx twopii{0.0, 2.0 * pi};

// Reduce an integer label into the canonical window {0, ..., r-1}.
inline int canonical_mod(int m, int r) {
    int v = m % r;
    return v < 0 ? v + r : v;
}

// Integer power by repeated multiplication; deterministic and exact in
// the exponent.
inline cplx ipow(cplx b, int e) {
    if (e < 0) return 1.0 / ipow(b, -e);
    cplx acc{1.0, 0.0};
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Modular data of the torus factor: two half-period ratios with positive
// imaginary part and the integer lens order r >= 1. Both nomes
// p = e^{2 pi i sigma}, q = e^{2 pi i tau} then lie inside the unit disk.
struct ModularParams {
    cplx sigma;
    cplx tau;
    int r = 1;

    void validate() const {
        if (r < 1) throw config_error("ModularParams: r must be >= 1");
        if (!(sigma.imag() > 0.0))
            throw config_error("ModularParams: Im(sigma) must be > 0");
        if (!(tau.imag() > 0.0))
            throw config_error("ModularParams: Im(tau) must be > 0");
    }

    cplx p() const { return std::exp(twopii * sigma); }
    cplx q() const { return std::exp(twopii * tau); }
    // Imaginary part of sigma + tau: the height of the zero-free strip
    // above the real axis.
    double strip_height() const { return sigma.imag() + tau.imag(); }
};

// One argument pair of the lens gamma function: a complex variable plus
// its integer label.
struct LensArg {
    cplx z;
    int m = 0;
};

} // namespace lensehg

#pragma once

// Core special functions: the multiple Bernoulli polynomial B_{3,3}, the
// exponent polynomials built from it, the short theta function, the
// elliptic gamma function of one nome pair, and the lens (r-labelled)
// elliptic gamma function together with its two theta-like shift factors.

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "lensehg/config.hpp"
#include "lensehg/errors.hpp"
#include "lensehg/modular.hpp"

namespace lensehg {

// Cubic multiple Bernoulli polynomial in one variable with three periods.
// Odd about the half-sum of the periods:
//   b33(w1 + w2 + w3 - z) = -b33(z).
inline cplx b33(cplx z, cplx w1, cplx w2, cplx w3) {
    const cplx e1 = w1 + w2 + w3;
    const cplx e2 = w1 * w2 + w1 * w3 + w2 * w3;
    const cplx s2 = w1 * w1 + w2 * w2 + w3 * w3;
    const cplx denom = w1 * w2 * w3;
    return z * z * z / denom - 1.5 * z * z * e1 / denom +
           0.5 * z * (s2 + 3.0 * e2) / denom - 0.25 * e1 * e2 / denom;
}

// Exponent kernel for r = 1: average of two B_{3,3} values with period
// triple (sigma, tau, -1). Satisfies r_comb(z) + r_comb(sigma+tau-z) = 0.
inline cplx r_comb(cplx z, cplx sigma, cplx tau) {
    return (b33(z, sigma, tau, -1.0) + b33(z - 1.0, sigma, tau, -1.0)) / 12.0;
}

// Lens generalisation of r_comb. Closed form of
//   r_comb(z + m*sigma; r*sigma, sigma+tau)
//     + r_comb(z + (r-m)*tau; r*tau, sigma+tau),
// polynomial in all arguments, so the label m need not be canonical here.
inline cplx r2(cplx z, int m, cplx sigma, cplx tau, int r) {
    const double md = m, rd = r;
    const cplx st = sigma + tau;
    const cplx q1 = st - 2.0 * z;
    const cplx q2 = 2.0 * z * z - 2.0 * z * st +
                    sigma * tau * (rd * rd + 6.0 * (md - rd) * md) + 1.0;
    return q1 * q2 / (24.0 * rd * sigma * tau) -
           (sigma - tau) * (2.0 * md - rd) * (md - rd) * md / (12.0 * rd);
}

// Exponent correction of the lens gamma function. Vanishes identically at
// m = 0 and obeys phi_e(z, m) + phi_e(sigma+tau-z, r-m) = 0.
inline cplx phi_e(cplx z, int m, const ModularParams& mp) {
    const int mc = canonical_mod(m, mp.r);
    const cplx sh = mp.sigma - 0.5;
    const cplx th = mp.tau + 0.5;
    return twopii * (r2(z, 0, sh, th, mp.r) - r2(z, mc, sh, th, mp.r));
}

namespace detail {

inline double guard_threshold(const NumericsConfig& cfg) {
    return 2.0 * std::sin(pi * cfg.pole_guard);
}

[[noreturn]] inline void throw_factor_guard(const char* what, cplx factor,
                                            int j, int k) {
    std::ostringstream os;
    os << what << ": product factor 1 - x with |1 - x| = "
       << std::abs(1.0 - factor) << " inside the pole guard band at shell ("
       << j << ", " << k << "); the evaluation point is too close to a pole "
       << "or zero of the infinite product";
    throw pole_error(os.str());
}

} // namespace detail

// Infinite q-Pochhammer product prod_{j>=0} (1 - a Q^j), |Q| < 1.
inline cplx qpoch_inf(cplx a, cplx Q, const NumericsConfig& cfg) {
    const double nq = std::abs(Q);
    if (!(nq < 1.0)) throw config_error("qpoch_inf: |Q| must be < 1");
    const double tg = detail::guard_threshold(cfg);
    const double cut = cfg.product_tol * (1.0 - nq);
    cplx prod = 1.0;
    cplx aj = a;
    for (int j = 0;; ++j) {
        if (std::abs(aj) < cut) break;
        if (j > cfg.product_max_index)
            throw convergence_error("qpoch_inf: shell index cap exceeded");
        const cplx f = 1.0 - aj;
        if (std::abs(f) < tg) detail::throw_factor_guard("qpoch_inf", aj, j, 0);
        prod *= f;
        aj *= Q;
    }
    return prod;
}

// Short theta function theta(x | Q) = (x; Q)_inf (Q/x; Q)_inf.
// Inversion theta(Q/x | Q) = theta(x | Q) and quasi-periodicity
// theta(Q x | Q) = -theta(x | Q) / x hold exactly.
inline cplx theta_q(cplx x, cplx Q, const NumericsConfig& cfg) {
    return qpoch_inf(x, Q, cfg) * qpoch_inf(Q / x, Q, cfg);
}

// Elliptic gamma function of one nome pair,
//   gamma1(z; sigma, tau) = prod_{j,k>=0}
//       (1 - e^{-2 pi i z} p^{j+1} q^{k+1}) / (1 - e^{2 pi i z} p^j q^k),
// with p = e^{2 pi i sigma}, q = e^{2 pi i tau}.
inline cplx gamma1(cplx z, cplx sigma, cplx tau, const NumericsConfig& cfg) {
    if (!(sigma.imag() > 0.0) || !(tau.imag() > 0.0))
        throw config_error("gamma1: Im(sigma), Im(tau) must be > 0");
    const cplx p = std::exp(twopii * sigma);
    const cplx q = std::exp(twopii * tau);
    const cplx wp = std::exp(twopii * z);
    const cplx wm = 1.0 / wp;
    const double mu = std::abs(p);   // outer shell ratio
    const double rho = std::abs(q);  // inner shell ratio
    const double tg = detail::guard_threshold(cfg);

    cplx num = 1.0, den = 1.0;
    cplx pj = 1.0; // p^j
    double muj = 1.0;
    for (int j = 0;; ++j) {
        // Remaining-tail bound if we stopped before this shell.
        const double head =
            muj * std::max(std::abs(wm) * mu * rho, std::abs(wp));
        if (head / ((1.0 - mu) * (1.0 - rho)) < cfg.product_tol) break;
        if (j > cfg.product_max_index)
            throw convergence_error("gamma1: outer shell index cap exceeded");

        const double cut =
            cfg.product_tol * (1.0 - rho) * (1.0 - mu) * muj * 0.5;
        cplx a = wm * p * pj * q; // numerator factor argument at k = 0
        cplx d = wp * pj;         // denominator factor argument at k = 0
        for (int k = 0;; ++k) {
            const double na = std::abs(a), nd = std::abs(d);
            if (na < cut && nd < cut) break;
            if (k > cfg.product_max_index)
                throw convergence_error("gamma1: inner shell index cap exceeded");
            if (na >= cut) {
                const cplx f = 1.0 - a;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("gamma1 numerator", a, j, k);
                num *= f;
            }
            if (nd >= cut) {
                const cplx f = 1.0 - d;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("gamma1 denominator", d, j, k);
                den *= f;
            }
            a *= q;
            d *= q;
        }
        pj *= p;
        muj *= mu;
    }
    return num / den;
}

// Unnormalised lens gamma product
//   gamma_product(z, m) = prod_{j,k>=0}
//     (1 - e^{-2 pi i z} (pq)^{j+1} p^{r(k+1)-m})
//     (1 - e^{-2 pi i z} (pq)^{j+1} q^{r k + m})
//   / [ (1 - e^{2 pi i z} (pq)^j p^{r k + m})
//       (1 - e^{2 pi i z} (pq)^j q^{r(k+1)-m}) ],
// m canonical in {0, ..., r-1}.
inline cplx gamma_product(cplx z, int m, const ModularParams& mp,
                          const NumericsConfig& cfg) {
    mp.validate();
    const int r = mp.r;
    const int mc = canonical_mod(m, r);
    const cplx p = mp.p();
    const cplx q = mp.q();
    const cplx pq = p * q;
    const cplx pr = ipow(p, r);
    const cplx qr = ipow(q, r);
    const cplx wp = std::exp(twopii * z);
    const cplx wm = 1.0 / wp;
    const double mu = std::abs(pq);
    const double rho = std::max(std::abs(pr), std::abs(qr));
    const double tg = detail::guard_threshold(cfg);

    const cplx prm = ipow(p, r - mc); // p^{r-m}
    const cplx pm = ipow(p, mc);      // p^m
    const cplx qrm = ipow(q, r - mc);
    const cplx qm = ipow(q, mc);

    cplx num = 1.0, den = 1.0;
    cplx pqj = 1.0; // (pq)^j
    double muj = 1.0;
    for (int j = 0;; ++j) {
        const double amp = std::max(std::abs(wm) * mu, std::abs(wp));
        if (muj * amp / ((1.0 - mu) * (1.0 - rho)) < cfg.product_tol) break;
        if (j > cfg.product_max_index)
            throw convergence_error(
                "gamma_product: outer shell index cap exceeded");

        const double cut =
            cfg.product_tol * (1.0 - rho) * (1.0 - mu) * muj * 0.25;
        cplx a1 = wm * pq * pqj * prm; // zero family, p-graded
        cplx a2 = wm * pq * pqj * qm;  // zero family, q-graded
        cplx d1 = wp * pqj * pm;       // pole family, p-graded
        cplx d2 = wp * pqj * qrm;      // pole family, q-graded
        for (int k = 0;; ++k) {
            const double m1 = std::abs(a1), m2 = std::abs(a2);
            const double m3 = std::abs(d1), m4 = std::abs(d2);
            if (m1 < cut && m2 < cut && m3 < cut && m4 < cut) break;
            if (k > cfg.product_max_index)
                throw convergence_error(
                    "gamma_product: inner shell index cap exceeded");
            if (m1 >= cut) {
                const cplx f = 1.0 - a1;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("lens gamma zero (p side)", a1, j, k);
                num *= f;
            }
            if (m2 >= cut) {
                const cplx f = 1.0 - a2;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("lens gamma zero (q side)", a2, j, k);
                num *= f;
            }
            if (m3 >= cut) {
                const cplx f = 1.0 - d1;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("lens gamma pole (p side)", d1, j, k);
                den *= f;
            }
            if (m4 >= cut) {
                const cplx f = 1.0 - d2;
                if (std::abs(f) < tg)
                    detail::throw_factor_guard("lens gamma pole (q side)", d2, j, k);
                den *= f;
            }
            a1 *= pr;
            a2 *= qr;
            d1 *= pr;
            d2 *= qr;
        }
        pqj *= pq;
        muj *= mu;
    }
    return num / den;
}

// Lens elliptic gamma function: exponent correction times the product.
// The label m is reduced into {0, ..., r-1} first; with that convention
//   lens_gamma(z, m) lens_gamma(sigma+tau-z, -m) = 1.
inline cplx lens_gamma(const LensArg& arg, const ModularParams& mp,
                       const NumericsConfig& cfg) {
    const int mc = canonical_mod(arg.m, mp.r);
    return std::exp(phi_e(arg.z, mc, mp)) * gamma_product(arg.z, mc, mp, cfg);
}

// First theta-like shift factor:
//   lens_theta1(z, m) = lens_gamma(z + sigma, m - 1) / lens_gamma(z, m).
// The short-theta argument uses the label window {1, ..., r}.
inline cplx lens_theta1(cplx z, int m, const ModularParams& mp,
                        const NumericsConfig& cfg) {
    const int mc = canonical_mod(m, mp.r);
    const int mhat = mc >= 1 ? mc : mp.r;
    const cplx pref = std::exp(phi_e(z + mp.sigma, canonical_mod(mc - 1, mp.r), mp) -
                               phi_e(z, mc, mp));
    const cplx q = mp.q();
    return pref * theta_q(std::exp(-twopii * z) * ipow(q, mhat), ipow(q, mp.r), cfg);
}

// Second theta-like shift factor:
//   lens_theta2(z, m) = lens_gamma(z + tau, m + 1) / lens_gamma(z, m),
// short-theta label window {0, ..., r-1}.
inline cplx lens_theta2(cplx z, int m, const ModularParams& mp,
                        const NumericsConfig& cfg) {
    const int mc = canonical_mod(m, mp.r);
    const cplx pref = std::exp(phi_e(z + mp.tau, canonical_mod(mc + 1, mp.r), mp) -
                               phi_e(z, mc, mp));
    const cplx p = mp.p();
    return pref * theta_q(std::exp(twopii * z) * ipow(p, mc), ipow(p, mp.r), cfg);
}

// Normalisation constant lambda = (p^r; p^r)_inf (q^r; q^r)_inf that
// multiplies every contour integral below.
inline cplx lambda_const(const ModularParams& mp, const NumericsConfig& cfg) {
    const cplx pr = ipow(mp.p(), mp.r);
    const cplx qr = ipow(mp.q(), mp.r);
    return qpoch_inf(pr, pr, cfg) * qpoch_inf(qr, qr, cfg);
}

} // namespace lensehg

#pragma once

// Identity verifiers: each op samples a random admissible configuration,
// evaluates both sides of one exact identity through independent code
// paths, and returns a structured report. Nothing here assumes the
// identity holds; the two sides always go through separate evaluations.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lensehg/kernel.hpp"
#include "lensehg/rng.hpp"
#include "lensehg/sumint.hpp"

namespace lensehg {

struct VerificationReport {
    std::string identity_name;
    nlohmann::json params; // full sampled configuration echo
    cplx lhs{0.0, 0.0};
    cplx rhs{0.0, 0.0};
    double abs_err = 0.0;
    double rel_err = 0.0;
    double quad_err_lhs = 0.0;
    double quad_err_rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    std::int64_t runtime_ms = 0;
};

namespace detail {

inline nlohmann::json jc(cplx v) {
    return nlohmann::json{{"re", v.real()}, {"im", v.imag()}};
}

inline nlohmann::json jcv(const std::vector<cplx>& vs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& v : vs) arr.push_back(jc(v));
    return arr;
}

inline nlohmann::json jmp(const ModularParams& mp) {
    return nlohmann::json{
        {"sigma", jc(mp.sigma)}, {"tau", jc(mp.tau)}, {"r", mp.r}};
}

inline nlohmann::json jan(const FlavorVectorAn& fv) {
    return nlohmann::json{{"m", fv.m},       {"n", fv.n},
                          {"t", jcv(fv.t)},  {"s", jcv(fv.s)},
                          {"a", fv.a},       {"b", fv.b},
                          {"Z", jc(fv.Z)},   {"Y", fv.Y}};
}

inline nlohmann::json jbcn(const FlavorVectorBCn& fv) {
    return nlohmann::json{
        {"m", fv.m}, {"n", fv.n}, {"t", jcv(fv.t)}, {"a", fv.a}};
}

inline void finish(VerificationReport& rep) {
    rep.abs_err = std::abs(rep.lhs - rep.rhs);
    const double scale = std::abs(rep.rhs);
    // An exact-zero reference means the deviation itself is the error.
    rep.rel_err = scale == 0.0 ? rep.abs_err
                               : rep.abs_err / std::max(scale, 1e-300);
    rep.pass = rep.rel_err <= rep.tolerance;
}

template <typename Body>
VerificationReport timed(const std::string& name, std::uint64_t seed,
                         double tol, Body&& body) {
    VerificationReport rep;
    rep.identity_name = name;
    rep.seed = seed;
    rep.tolerance = tol;
    const auto start = std::chrono::steady_clock::now();
    body(rep);
    finish(rep);
    const auto stop = std::chrono::steady_clock::now();
    rep.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start)
            .count();
    return rep;
}

// Modular parameters for a seeded verification run: center of the test
// regime, comfortably away from every degeneration.
inline ModularParams draw_modular_params(Rng& rng, int r) {
    ModularParams mp;
    mp.sigma = cplx{rng.uniform(-0.2, 0.2), rng.uniform(0.25, 0.4)};
    mp.tau = cplx{rng.uniform(-0.2, 0.2), rng.uniform(0.25, 0.4)};
    mp.r = r;
    return mp;
}

// Draw `count` positive heights in a +-15% band and rescale them to the
// exact total.
inline std::vector<double> banded_heights(Rng& rng, int count, double total) {
    std::vector<double> h(count);
    double sum = 0.0;
    const double center = total / count;
    for (double& v : h) {
        v = center * (1.0 + 0.15 * (2.0 * rng.u01() - 1.0));
        sum += v;
    }
    for (double& v : h) v *= total / sum;
    return h;
}

} // namespace detail

// Default verification tolerance by quadrature dimensionality.
inline double default_tolerance(int lhs_dim, int rhs_dim) {
    const int d = std::max(lhs_dim, rhs_dim);
    if (d <= 0) return 1e-10;
    if (d == 1) return 1e-8;
    return 1e-6;
}

// Sample an admissible A-type flavor configuration with both total
// constraints at zero: balancing holds exactly and both the direct and
// the transformed contours clear the pole guard.
inline FlavorVectorAn sample_an(int m, int n, int r, cplx sigma, cplx tau,
                                std::uint64_t seed,
                                const NumericsConfig& cfg = {}) {
    ModularParams mp{sigma, tau, r};
    mp.validate();
    Rng rng(seed);
    const int K = m + n + 2;
    const cplx target = static_cast<double>(m + 1) * (sigma + tau);
    for (int attempt = 0; attempt < 16; ++attempt) {
        FlavorVectorAn fv;
        fv.m = m;
        fv.n = n;
        const auto hu = detail::banded_heights(rng, K, target.imag() / 2.0);
        const auto hv = detail::banded_heights(rng, K, target.imag() / 2.0);
        double re_sum = 0.0;
        for (int j = 0; j < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.t.push_back(cplx{re, hu[j]});
            re_sum += re;
        }
        for (int j = 0; j + 1 < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.s.push_back(cplx{re, hv[j]});
            re_sum += re;
        }
        fv.s.push_back(cplx{target.real() - re_sum, hv[K - 1]});
        int ia = 0;
        for (int j = 0; j < K; ++j) {
            fv.a.push_back(rng.below(r));
            ia += fv.a.back();
        }
        for (int j = 0; j + 1 < K; ++j) {
            fv.b.push_back(rng.below(r));
            ia += fv.b.back();
        }
        fv.b.push_back(canonical_mod(-ia, r));

        ModularParams check = mp;
        if (an_pole_margin(fv, check) > cfg.pole_guard &&
            an_pole_margin(an_transformed(fv, check), check) > cfg.pole_guard)
            return fv;
    }
    throw sampler_error(
        "sample_an: no admissible configuration after 16 attempts");
}

// Same for the BC-type family: one flavor list, direct and transformed
// heights both inside the strip.
inline FlavorVectorBCn sample_bcn(int m, int n, int r, cplx sigma, cplx tau,
                                  std::uint64_t seed,
                                  const NumericsConfig& cfg = {}) {
    ModularParams mp{sigma, tau, r};
    mp.validate();
    Rng rng(seed);
    const int K = 2 * (m + n + 2);
    const cplx target = static_cast<double>(m + 1) * (sigma + tau);
    for (int attempt = 0; attempt < 16; ++attempt) {
        FlavorVectorBCn fv;
        fv.m = m;
        fv.n = n;
        const auto hu = detail::banded_heights(rng, K, target.imag());
        double re_sum = 0.0;
        for (int j = 0; j + 1 < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.t.push_back(cplx{re, hu[j]});
            re_sum += re;
        }
        fv.t.push_back(cplx{target.real() - re_sum, hu[K - 1]});
        int ia = 0;
        for (int j = 0; j + 1 < K; ++j) {
            fv.a.push_back(rng.below(r));
            ia += fv.a.back();
        }
        fv.a.push_back(canonical_mod(-ia, r));

        ModularParams check = mp;
        if (bcn_pole_margin(fv, check) > cfg.pole_guard &&
            bcn_pole_margin(bcn_transformed(fv, check), check) > cfg.pole_guard)
            return fv;
    }
    throw sampler_error(
        "sample_bcn: no admissible configuration after 16 attempts");
}

// ---------------------------------------------------------------------
// A-type verifiers
// ---------------------------------------------------------------------

// Transform identity: the sum/integral at the original fields equals the
// one at the reflected fields times the flavor cross product.
inline VerificationReport verify_an_transform(
    int m, int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 0.0, std::optional<ModularParams> mp_opt = std::nullopt) {
    if (tol <= 0.0) tol = default_tolerance(n, m);
    return detail::timed("an_transform", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorAn fv = sample_an(m, n, r, mp.sigma, mp.tau, seed, cfg);
        const FlavorVectorAn tfv = an_transformed(fv, mp);
        const ValueWithError lhs = an_sum_integral(fv, mp, cfg);
        const ValueWithError rhs = an_sum_integral(tfv, mp, cfg);
        const cplx cross = an_cross_product(fv, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = rhs.value * cross;
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.quad_err_rhs = rhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jan(fv)},
                      {"transformed_fields", detail::jan(tfv)},
                      {"cross_product", detail::jc(cross)},
                      {"lhs_nodes", lhs.nodes_used},
                      {"rhs_nodes", rhs.nodes_used}};
    });
}

// Applying the field transform twice must return the original fields, and
// the two cross products must cancel exactly.
inline VerificationReport verify_an_involution(
    int m, int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-8, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("an_involution", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorAn fv = sample_an(m, n, r, mp.sigma, mp.tau, seed, cfg);
        const FlavorVectorAn back = an_transformed(an_transformed(fv, mp), mp);
        double drift = std::abs(cplx(back.Z - fv.Z));
        drift = std::max(drift, static_cast<double>(std::abs(back.Y - fv.Y)));
        for (int j = 0; j < fv.flavors(); ++j) {
            drift = std::max(drift, std::abs(back.t[j] - fv.t[j]));
            drift = std::max(drift, std::abs(back.s[j] - fv.s[j]));
            drift = std::max(drift,
                             static_cast<double>(std::abs(back.a[j] - fv.a[j])));
            drift = std::max(drift,
                             static_cast<double>(std::abs(back.b[j] - fv.b[j])));
        }
        rep.lhs = an_cross_product(fv, mp, cfg) *
                  an_cross_product(an_transformed(fv, mp), mp, cfg);
        rep.rhs = cplx{1.0, 0.0};
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jan(fv)},
                      {"field_round_trip_drift", drift}};
        if (drift > 1e-12) rep.tolerance = -1.0; // force failure
    });
}

// Closed evaluation at m = 0: the sum/integral collapses to a finite
// product over total-shifted fields times the cross product.
inline VerificationReport verify_an_evaluation(
    int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 0.0, std::optional<ModularParams> mp_opt = std::nullopt) {
    if (tol <= 0.0) tol = default_tolerance(n, 0);
    return detail::timed("an_evaluation", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorAn fv = sample_an(0, n, r, mp.sigma, mp.tau, seed, cfg);
        const ValueWithError lhs = an_sum_integral(fv, mp, cfg);
        const cplx T = an_total_t(fv), S = an_total_s(fv);
        const int A = an_total_a(fv), B = an_total_b(fv);
        cplx closed{1.0, 0.0};
        for (int j = 0; j < fv.flavors(); ++j) {
            closed *= lens_gamma({T - fv.t[j], A - fv.a[j]}, mp, cfg);
            closed *= lens_gamma({S - fv.s[j], B - fv.b[j]}, mp, cfg);
        }
        closed *= an_cross_product(fv, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = closed;
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jan(fv)},
                      {"lhs_nodes", lhs.nodes_used}};
    });
}

// Shift and swap covariance of the A-type family: pure reparametrisations
// that must leave the value unchanged.
inline VerificationReport verify_an_covariance(
    int m, int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 0.0, std::optional<ModularParams> mp_opt = std::nullopt) {
    if (tol <= 0.0) tol = default_tolerance(n, n);
    return detail::timed("an_covariance", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorAn fv = sample_an(m, n, r, mp.sigma, mp.tau, seed, cfg);
        const cplx c{rng.uniform(-0.1, 0.1), rng.uniform(-0.02, 0.02)};
        const int k = rng.below(2 * r + 1) - r;
        const FlavorVectorAn moved = an_shifted(an_swapped(fv), c, k);
        const ValueWithError lhs = an_sum_integral(fv, mp, cfg);
        const ValueWithError rhs = an_sum_integral(moved, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = rhs.value;
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.quad_err_rhs = rhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jan(fv)},
                      {"shift_c", detail::jc(c)},
                      {"shift_k", k}};
    });
}

// ---------------------------------------------------------------------
// BC-type verifiers
// ---------------------------------------------------------------------

inline VerificationReport verify_bcn_transform(
    int m, int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 0.0, std::optional<ModularParams> mp_opt = std::nullopt) {
    if (tol <= 0.0) tol = default_tolerance(n, m);
    return detail::timed("bcn_transform", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorBCn fv =
            sample_bcn(m, n, r, mp.sigma, mp.tau, seed, cfg);
        const FlavorVectorBCn tfv = bcn_transformed(fv, mp);
        const ValueWithError lhs = bcn_sum_integral(fv, mp, cfg);
        const ValueWithError rhs = bcn_sum_integral(tfv, mp, cfg);
        const cplx cross = bcn_cross_product(fv, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = rhs.value * cross;
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.quad_err_rhs = rhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jbcn(fv)},
                      {"transformed_fields", detail::jbcn(tfv)},
                      {"cross_product", detail::jc(cross)},
                      {"lhs_nodes", lhs.nodes_used},
                      {"rhs_nodes", rhs.nodes_used}};
    });
}

inline VerificationReport verify_bcn_evaluation(
    int n, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 0.0, std::optional<ModularParams> mp_opt = std::nullopt) {
    if (tol <= 0.0) tol = default_tolerance(n, 0);
    return detail::timed("bcn_evaluation", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorBCn fv =
            sample_bcn(0, n, r, mp.sigma, mp.tau, seed, cfg);
        const ValueWithError lhs = bcn_sum_integral(fv, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = bcn_cross_product(fv, mp, cfg);
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jbcn(fv)},
                      {"lhs_nodes", lhs.nodes_used}};
    });
}

// A BC-type integral with one variable against its A-type rewriting: the
// two evaluations share nothing past the gamma kernel.
inline VerificationReport verify_bcn1_reduction(
    int m, int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-10, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("bcn1_reduction", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorBCn fv =
            sample_bcn(m, 1, r, mp.sigma, mp.tau, seed, cfg);
        const ValueWithError lhs = bcn_sum_integral(fv, mp, cfg);
        const ValueWithError rhs = an_sum_integral(bcn1_as_an(fv), mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = rhs.value;
        rep.quad_err_lhs = lhs.est_rel_error;
        rep.quad_err_rhs = rhs.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)}, {"fields", detail::jbcn(fv)}};
    });
}

// ---------------------------------------------------------------------
// One-variable evaluation with six flavors (the r-labelled beta sum)
// ---------------------------------------------------------------------

// Six-flavor one-variable evaluation, plus two structural checks: the
// integrand is invariant under simultaneous reflection of the variable
// and its label, and folding the label sum onto the reduced window with
// multiplicity two reproduces the full sum.
inline VerificationReport verify_elliptic_beta(
    int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-8, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("elliptic_beta", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const FlavorVectorBCn fv =
            sample_bcn(0, 1, r, mp.sigma, mp.tau, seed, cfg);
        const ValueWithError lhs = bcn_sum_integral(fv, mp, cfg);
        rep.lhs = lhs.value;
        rep.rhs = bcn_cross_product(fv, mp, cfg);
        rep.quad_err_lhs = lhs.est_rel_error;

        // Pointwise reflection symmetry of the integrand.
        double sym_err = 0.0;
        for (int i = 0; i < 5; ++i) {
            const std::vector<cplx> z{cplx{rng.uniform(0.03, 0.97), 0.0}};
            const std::vector<cplx> zn{1.0 - z[0]}; // -z modulo the period
            for (int y = 0; y < r; ++y) {
                const cplx d1 = bcn_integrand(z, {y}, fv, mp, cfg);
                const cplx d2 =
                    bcn_integrand(zn, {canonical_mod(r - y, r)}, fv, mp, cfg);
                sym_err = std::max(
                    sym_err, std::abs(d1 - d2) / std::max(std::abs(d1), 1e-300));
            }
        }

        // Folded label sum: weight 2 on interior labels, 1 on fixed points.
        const int nodes = std::max(lhs.nodes_used, cfg.quad_start_nodes);
        ContourSpec spec;
        spec.dim = 1;
        auto weighted = [&](const std::vector<cplx>& z) {
            cplx acc{0.0, 0.0};
            for (int y = 0; y <= r / 2; ++y) {
                const double w = (y == 0 || 2 * y == r) ? 1.0 : 2.0;
                acc += w * bcn_integrand(z, {y}, fv, mp, cfg);
            }
            return acc;
        };
        const cplx lam = lambda_const(mp, cfg);
        const cplx folded =
            0.5 * lam * integrate_periodic(weighted, spec, nodes);
        const double fold_err =
            std::abs(folded - lhs.value) / std::max(std::abs(lhs.value), 1e-300);

        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jbcn(fv)},
                      {"integrand_symmetry_error", sym_err},
                      {"folded_sum_error", fold_err},
                      {"lhs_nodes", lhs.nodes_used}};
        if (sym_err > 1e-12 || fold_err > 1e-12) rep.tolerance = -1.0;
    });
}

// ---------------------------------------------------------------------
// Degeneration limits
// ---------------------------------------------------------------------

// A-type flavor collision: pair zero is detuned by a complex offset of
// magnitude delta; the ratio of the full sum/integral to the divergent
// factor cluster must approach the reduced sum/integral with one variable
// and pair zero removed.
inline VerificationReport verify_an_limit(
    int m, int r, std::uint64_t seed, double delta,
    const NumericsConfig& cfg = {}, double tol = 5e-3,
    std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("an_limit", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const int n = 1;
        const int K = m + n + 2;
        const double h0 = delta / 4.0;
        const cplx delta_c{delta * std::sqrt(3.0) / 2.0, 2.0 * h0};

        // Regular pairs carry the full balancing minus the detuned pair.
        const cplx target =
            static_cast<double>(m + 1) * (mp.sigma + mp.tau) - delta_c;
        FlavorVectorAn fv;
        fv.m = m;
        fv.n = n;
        const auto hu = detail::banded_heights(rng, K - 1, target.imag() / 2.0);
        const auto hv = detail::banded_heights(rng, K - 1, target.imag() / 2.0);
        const double re0 = rng.uniform(-0.2, 0.2);
        fv.t.push_back(cplx{re0 + delta_c.real(), h0});
        fv.s.push_back(cplx{-re0, h0});
        double re_sum = 0.0;
        for (int j = 0; j + 1 < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.t.push_back(cplx{re, hu[j]});
            re_sum += re;
        }
        for (int j = 0; j + 2 < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.s.push_back(cplx{re, hv[j]});
            re_sum += re;
        }
        fv.s.push_back(cplx{target.real() - re_sum, hv[K - 2]});
        const int b0 = rng.below(r);
        fv.a.push_back(canonical_mod(-b0, r));
        fv.b.push_back(b0);
        int ia = fv.a[0] + fv.b[0];
        for (int j = 1; j + 1 < K; ++j) {
            fv.a.push_back(rng.below(r));
            fv.b.push_back(rng.below(r));
            ia += fv.a.back() + fv.b.back();
        }
        fv.a.push_back(rng.below(r));
        ia += fv.a.back();
        fv.b.push_back(canonical_mod(-ia, r));

        NumericsConfig lim_cfg = cfg;
        lim_cfg.pole_guard = delta / 8.0;
        lim_cfg.quad_max_nodes = 32768;

        const ValueWithError full = an_sum_integral(fv, mp, lim_cfg);
        cplx divergent = lens_gamma({fv.t[0] + fv.s[0], 0}, mp, lim_cfg);
        for (int i = 1; i < K; ++i) {
            divergent *= lens_gamma(
                {fv.t[0] + fv.s[i], -fv.b[0] + fv.b[i]}, mp, lim_cfg);
            divergent *= lens_gamma(
                {fv.t[i] + fv.s[0], fv.a[i] + fv.b[0]}, mp, lim_cfg);
        }

        // The reduced family keeps the regular pairs only; its balancing
        // is off by exactly the detuning, so the zero-variable value is
        // assembled directly as the defining product.  Pinning the colliding
        // variable at the pole leaves the remaining total at Z - s0, Y - b0.
        const cplx Zr = fv.Z - fv.s[0];
        const int Yr = fv.Y - fv.b[0];
        cplx reduced{1.0, 0.0};
        for (int j = 1; j < K; ++j) {
            reduced *= lens_gamma({fv.t[j] + Zr, fv.a[j] + Yr}, mp, lim_cfg);
            reduced *= lens_gamma({fv.s[j] - Zr, fv.b[j] - Yr}, mp, lim_cfg);
        }

        rep.lhs = full.value / divergent;
        rep.rhs = reduced;
        rep.quad_err_lhs = full.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jan(fv)},
                      {"delta", delta},
                      {"lhs_nodes", full.nodes_used},
                      {"lhs_converged", full.converged}};
    });
}

// BC-type flavor collision: flavors zero and one are detuned from exact
// opposition; the normalised ratio approaches the family with both
// flavors and the integration variable removed (the empty value is one).
inline VerificationReport verify_bcn_limit(
    int m, int r, std::uint64_t seed, double delta,
    const NumericsConfig& cfg = {}, double tol = 5e-3,
    std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("bcn_limit", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const int n = 1;
        const int K = 2 * (m + n + 2);
        const double h0 = delta / 4.0;
        const cplx delta_c{delta * std::sqrt(3.0) / 2.0, 2.0 * h0};
        const cplx target =
            static_cast<double>(m + 1) * (mp.sigma + mp.tau) - delta_c;

        FlavorVectorBCn fv;
        fv.m = m;
        fv.n = n;
        const double re0 = rng.uniform(-0.2, 0.2);
        fv.t.push_back(cplx{re0 + delta_c.real(), h0});
        fv.t.push_back(cplx{-re0, h0});
        const auto hu = detail::banded_heights(rng, K - 2, target.imag());
        double re_sum = 0.0;
        for (int j = 0; j + 3 < K; ++j) {
            const double re = rng.uniform(-0.3, 0.3);
            fv.t.push_back(cplx{re, hu[j]});
            re_sum += re;
        }
        fv.t.push_back(cplx{target.real() - re_sum, hu[K - 3]});
        const int a1 = rng.below(r);
        fv.a.push_back(canonical_mod(-a1, r));
        fv.a.push_back(a1);
        int ia = fv.a[0] + fv.a[1];
        for (int j = 2; j + 1 < K; ++j) {
            fv.a.push_back(rng.below(r));
            ia += fv.a.back();
        }
        fv.a.push_back(canonical_mod(-ia, r));

        NumericsConfig lim_cfg = cfg;
        lim_cfg.pole_guard = delta / 8.0;
        lim_cfg.quad_max_nodes = 32768;

        const ValueWithError full = bcn_sum_integral(fv, mp, lim_cfg);
        cplx divergent = lens_gamma({fv.t[0] + fv.t[1], 0}, mp, lim_cfg);
        for (int i = 2; i < K; ++i) {
            divergent *= lens_gamma(
                {fv.t[0] + fv.t[i], -fv.a[1] + fv.a[i]}, mp, lim_cfg);
            divergent *= lens_gamma(
                {fv.t[1] + fv.t[i], fv.a[1] + fv.a[i]}, mp, lim_cfg);
        }

        rep.lhs = full.value / divergent;
        rep.rhs = cplx{1.0, 0.0}; // the empty family
        rep.quad_err_lhs = full.est_rel_error;
        rep.params = {{"modular", detail::jmp(mp)},
                      {"fields", detail::jbcn(fv)},
                      {"delta", delta},
                      {"lhs_nodes", full.nodes_used},
                      {"lhs_converged", full.converged}};
    });
}

// ---------------------------------------------------------------------
// Determinant identities for the shift factors
// ---------------------------------------------------------------------

namespace detail {

inline cplx theta_k(int k, cplx z, int m, const ModularParams& mp,
                    const NumericsConfig& cfg) {
    return k == 1 ? lens_theta1(z, m, mp, cfg) : lens_theta2(z, m, mp, cfg);
}

// Determinant of a small complex matrix by Laplace expansion (n <= 3 in
// every caller).
inline cplx small_det(const std::vector<std::vector<cplx>>& M) {
    const std::size_t n = M.size();
    if (n == 1) return M[0][0];
    if (n == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<cplx>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<cplx> row;
            for (std::size_t l = 0; l < n; ++l)
                if (l != j) row.push_back(M[i][l]);
            minor.push_back(std::move(row));
        }
        const cplx term = M[0][j] * small_det(minor);
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

} // namespace detail

// Determinant of shift-factor ratios against its closed product form,
// plus invariance of both sides under a full period step in one row.
inline VerificationReport verify_frobenius_det(
    int n, int r, int k, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-10, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("frobenius_det", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const double rd = mp.r;

        std::vector<cplx> x(n), w(n);
        std::vector<int> c(n), d(n);
        cplx t;
        auto evaluate =
            [&](const std::vector<cplx>& xs, const std::vector<int>& cs,
                cplx& lhs_out, cplx& rhs_out) {
                std::vector<std::vector<cplx>> M(n, std::vector<cplx>(n));
                const cplx th_t = detail::theta_k(k, t, 0, mp, cfg);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        M[i][j] =
                            detail::theta_k(k, t + xs[i] + w[j], cs[i] + d[j],
                                            mp, cfg) /
                            (th_t * detail::theta_k(k, xs[i] + w[j],
                                                    cs[i] + d[j], mp, cfg));
                lhs_out = detail::small_det(M);

                cplx X{0.0, 0.0}, W{0.0, 0.0};
                int C = 0, D = 0;
                for (int i = 0; i < n; ++i) {
                    X += xs[i];
                    W += w[i];
                    C += cs[i];
                    D += d[i];
                }
                cplx num = detail::theta_k(k, t + X + W, C + D, mp, cfg);
                cplx den = th_t;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        den *= detail::theta_k(k, xs[i] + w[j], cs[i] + d[j],
                                               mp, cfg);
                cplx pair{1.0, 0.0};
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const cplx phase = std::exp(
                            twopii *
                            (xs[j] + w[j] -
                             static_cast<double>(cs[j] + d[j])) /
                            rd);
                        pair *= phase *
                                detail::theta_k(k, xs[i] - xs[j],
                                                cs[i] - cs[j], mp, cfg) *
                                detail::theta_k(k, w[i] - w[j], d[i] - d[j],
                                                mp, cfg);
                    }
                rhs_out = num / den * pair;
            };

        for (int attempt = 0;; ++attempt) {
            if (attempt >= 16)
                throw sampler_error(
                    "verify_frobenius_det: no well-conditioned sample "
                    "after 16 attempts");
            t = cplx{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
            for (int i = 0; i < n; ++i) {
                x[i] = cplx{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
                w[i] = cplx{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
                c[i] = rng.below(r);
                d[i] = rng.below(r);
            }
            try {
                evaluate(x, c, rep.lhs, rep.rhs);
            } catch (const pole_error&) {
                continue;
            }
            if (std::abs(rep.rhs) < 1e-8 || std::abs(rep.lhs) > 1e8 ||
                !std::isfinite(std::abs(rep.lhs)))
                continue;
            break;
        }

        // Full period step in row zero: both sides must be unchanged.
        std::vector<cplx> x_shift = x;
        std::vector<int> c_shift = c;
        x_shift[0] += 1.0;
        c_shift[0] += mp.r;
        cplx lhs_shift, rhs_shift;
        evaluate(x_shift, c_shift, lhs_shift, rhs_shift);
        const double inv_err =
            std::max(std::abs(lhs_shift - rep.lhs), std::abs(rhs_shift - rep.rhs)) /
            std::max(std::abs(rep.lhs), 1e-300);

        rep.params = {{"modular", detail::jmp(mp)},
                      {"t", detail::jc(t)},
                      {"x", detail::jcv(x)},
                      {"w", detail::jcv(w)},
                      {"c", c},
                      {"d", d},
                      {"k", k},
                      {"period_step_invariance_error", inv_err}};
        if (inv_err > tol) rep.tolerance = -1.0;
    });
}

// Reciprocal double-argument determinant against its closed product form.
inline VerificationReport verify_cauchy_det(
    int n, int r, int k, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-10, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("cauchy_det", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        const double rd = mp.r;

        auto theta_pm = [&](cplx u, cplx v, int cu, int cv) {
            return detail::theta_k(k, u + v, cu + cv, mp, cfg) *
                   detail::theta_k(k, u - v, cu - cv, mp, cfg);
        };

        for (int attempt = 0;; ++attempt) {
            if (attempt >= 16)
                throw sampler_error(
                    "verify_cauchy_det: no well-conditioned sample after "
                    "16 attempts");
            std::vector<cplx> x(n), w(n);
            std::vector<int> c(n), d(n);
            for (int i = 0; i < n; ++i) {
                x[i] = cplx{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
                w[i] = cplx{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
                c[i] = rng.below(r);
                d[i] = rng.below(r);
            }
            try {
                std::vector<std::vector<cplx>> M(n, std::vector<cplx>(n));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        M[i][j] = 1.0 / theta_pm(x[i], w[j], c[i], d[j]);
                const cplx lhs = detail::small_det(M);

                cplx pair{1.0, 0.0};
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const cplx phase = std::exp(
                            -twopii *
                            (x[j] - w[i] -
                             static_cast<double>(c[j] - d[i]) + rd / 2.0) /
                            rd);
                        pair *= theta_pm(x[i], x[j], c[i], c[j]) *
                                theta_pm(w[i], w[j], d[i], d[j]) / phase;
                    }
                cplx den{1.0, 0.0};
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        den *= theta_pm(x[i], w[j], c[i], d[j]);
                const cplx rhs = pair / den;

                if (std::abs(rhs) < 1e-8 || std::abs(lhs) > 1e10 ||
                    !std::isfinite(std::abs(lhs)))
                    continue;
                rep.lhs = lhs;
                rep.rhs = rhs;
                rep.params = {{"modular", detail::jmp(mp)},
                              {"x", detail::jcv(x)},
                              {"w", detail::jcv(w)},
                              {"c", c},
                              {"d", d},
                              {"k", k}};
                break;
            } catch (const pole_error&) {
                continue;
            }
        }
    });
}

// ---------------------------------------------------------------------
// Kernel-level identity sweep and the leading-pole residue
// ---------------------------------------------------------------------

// Random sweep over the exact relations of the gamma kernel: reflection,
// period steps, shift-factor ratios and their quasi-periodicity, the
// graded factorisation, and the exponent polynomial rearrangements.
// Reports the worst relative deviation seen across all samples.
inline VerificationReport verify_kernel_suite(int r, int samples,
                                              std::uint64_t seed,
                                              const NumericsConfig& cfg = {},
                                              double tol = 1e-10) {
    return detail::timed("kernel_suite", seed, tol, [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        double worst = 0.0;
        auto track = [&](cplx got, cplx want) {
            worst = std::max(
                worst, std::abs(got - want) / std::max(std::abs(want), 1.0));
        };
        for (int it = 0; it < samples; ++it) {
            ModularParams mp;
            mp.sigma = cplx{rng.uniform(-0.3, 0.3), rng.uniform(0.12, 0.45)};
            mp.tau = cplx{rng.uniform(-0.3, 0.3), rng.uniform(0.12, 0.45)};
            mp.r = r;
            const cplx z{rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3)};
            const int m = rng.below(r);
            const double md = m, rd = r;

            cplx g;
            try {
                g = lens_gamma({z, m}, mp, cfg);
            } catch (const pole_error&) {
                continue; // rare unlucky draw; the next sample covers it
            }

            // Reflection.
            track(g * lens_gamma({mp.sigma + mp.tau - z, -m}, mp, cfg), 1.0);
            // Real period step and the exact double period.
            track(lens_gamma({z + 1.0, m}, mp, cfg),
                  g * std::exp(cplx{0.0, pi} * (md * (md - rd) / rd)));
            track(lens_gamma({z + 2.0 * rd, m}, mp, cfg), g);
            // Shift factors as ratios.
            track(lens_theta1(z, m, mp, cfg) * g,
                  lens_gamma({z + mp.sigma, m - 1}, mp, cfg));
            track(lens_theta2(z, m, mp, cfg) * g,
                  lens_gamma({z + mp.tau, m + 1}, mp, cfg));
            // Two-step shift products.
            cplx prod{1.0, 0.0};
            for (int j = 0; j < 2; ++j)
                prod *= lens_theta2(z + static_cast<double>(j) * mp.tau,
                                    m + j, mp, cfg);
            track(lens_gamma({z + 2.0 * mp.tau, m + 2}, mp, cfg), g * prod);
            // Negation of the shift factors.
            const cplx neg = std::exp(-twopii * (z - md) / rd);
            track(lens_theta1(-z, -m, mp, cfg),
                  -lens_theta1(z, m, mp, cfg) * neg);
            track(lens_theta2(-z, -m, mp, cfg),
                  -lens_theta2(z, m, mp, cfg) * neg);
            // Graded factorisation through the one-nome-pair gamma.
            track(std::exp(phi_e(z, m, mp)) *
                      gamma1(z + md * mp.sigma, rd * mp.sigma,
                             mp.sigma + mp.tau, cfg) *
                      gamma1(z + (rd - md) * mp.tau, rd * mp.tau,
                             mp.sigma + mp.tau, cfg),
                  g);
            // Exponent polynomial rearrangement and reflection.
            track(twopii * (r2(z, 0, mp.sigma, mp.tau, r) +
                            r2(0.0, m, 0.5, -0.5, r) -
                            r2(z, m, mp.sigma, mp.tau, r)),
                  phi_e(z, m, mp));
            track(phi_e(z, m, mp) +
                      phi_e(mp.sigma + mp.tau - z, r - m, mp),
                  0.0);
        }
        rep.lhs = cplx{worst, 0.0};
        rep.rhs = cplx{0.0, 0.0};
        rep.params = {{"r", r}, {"samples", samples}, {"worst_rel_err", worst}};
        rep.quad_err_lhs = 0.0;
    });
}

// Scaled residue of the leading pole against the closed constant
// i / (2 pi lambda), via two-point extrapolation in the detuning.
inline VerificationReport verify_residue(
    int r, std::uint64_t seed, const NumericsConfig& cfg = {},
    double tol = 1e-6, std::optional<ModularParams> mp_opt = std::nullopt) {
    return detail::timed("residue_leading_pole", seed, tol,
                         [&](VerificationReport& rep) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        const ModularParams mp =
            mp_opt ? *mp_opt : detail::draw_modular_params(rng, r);
        NumericsConfig tight = cfg;
        tight.pole_guard = 1e-6;
        const double d1 = 1e-4, d2 = 5e-5;
        const cplx g1 = d1 * lens_gamma({cplx{d1, 0.0}, 0}, mp, tight);
        const cplx g2 = d2 * lens_gamma({cplx{d2, 0.0}, 0}, mp, tight);
        rep.lhs = 2.0 * g2 - g1;
        rep.rhs = cplx{0.0, 1.0} / (2.0 * pi * lambda_const(mp, cfg));
        rep.params = {{"modular", detail::jmp(mp)},
                      {"detunings", {d1, d2}}};
    });
}

} // namespace lensehg

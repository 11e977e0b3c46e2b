#ifndef LENSEHG_LATTICE_HPP
#define LENSEHG_LATTICE_HPP

// Integrable lattice layer: spin states carrying paired continuous and
// discrete components, edge Boltzmann weights built from the reflected
// gamma kernel, the two four-edge star weights, and the star-star
// relation checked both directly and through the A-type transform.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "identities.hpp"
#include "kernel.hpp"
#include "modular.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sumint.hpp"

namespace lensehg {

// One spin: n continuous components summing to zero mod 1 (the sampled
// states keep the dependent component as the exact negative sum) and n
// discrete components in {0, ..., r-1} summing to zero mod r.
struct Spin {
    std::vector<double> x;
    std::vector<int> m;

    int size() const { return static_cast<int>(x.size()); }

    void validate(int r) const {
        if (x.empty() || x.size() != m.size())
            throw config_error("Spin: component lists must be nonempty and "
                               "of equal length");
        double sx = 0.0;
        int sm = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!std::isfinite(x[j]))
                throw config_error("Spin: continuous components must be finite");
            if (m[j] < 0 || m[j] >= r)
                throw config_error(
                    "Spin: discrete components must lie in {0, ..., r-1}");
            sx += x[j];
            sm += m[j];
        }
        if (std::abs(sx - std::round(sx)) > 1e-12)
            throw config_error("Spin: continuous components must sum to an "
                               "integer");
        if (canonical_mod(sm, r) != 0)
            throw config_error("Spin: discrete components must sum to 0 mod r");
    }
};

// Modular data plus the four rapidities of one star. The crossing
// parameter is never free: it is recomputed from the modular parameters.
struct LatticeParams {
    ModularParams modular;
    int n = 1;
    cplx u{0.0, 0.0}, up{0.0, 0.0}, v{0.0, 0.0}, vp{0.0, 0.0};

    // Crossing parameter eta; i*eta equals half the modular sum.
    cplx eta() const { return cplx{0.0, -0.5} * (modular.sigma + modular.tau); }

    void validate() const {
        modular.validate();
        if (n < 1) throw config_error("LatticeParams: n must be >= 1");
    }
};

// Reflected kernel the weights are built from.
inline cplx phi_fn(const LensArg& arg, const ModularParams& mp,
                   const NumericsConfig& cfg = {}) {
    const cplx ieta = 0.5 * (mp.sigma + mp.tau);
    return lens_gamma({ieta - arg.z, -arg.m}, mp, cfg);
}

// Edge weight with rapidity difference alpha: one kernel factor per
// component pair of the two spins.
inline cplx w_weight(cplx alpha, const Spin& a, const Spin& b,
                     const ModularParams& mp, const NumericsConfig& cfg = {}) {
    if (a.size() != b.size())
        throw config_error("w_weight: spins must have equal length");
    const cplx ia = cplx{0.0, 1.0} * alpha;
    cplx prod{1.0, 0.0};
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            try {
                prod *= phi_fn({a.x[i] - b.x[j] + ia, a.m[i] - b.m[j]}, mp,
                               cfg);
            } catch (const pole_error& e) {
                std::ostringstream os;
                os << "w_weight: factor (i=" << i << ", j=" << j
                   << "): " << e.what();
                throw pole_error(os.str());
            }
        }
    return prod;
}

// Spin self-interaction: the crossing-shifted kernel over all component
// pairs. Equals the reciprocal of the A-type denominator pair product.
inline cplx self_weight(const Spin& a, const ModularParams& mp,
                        const NumericsConfig& cfg = {}) {
    const cplx neg_ieta = -0.5 * (mp.sigma + mp.tau);
    cplx prod{1.0, 0.0};
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j) {
            const double dx = a.x[i] - a.x[j];
            const int dm = a.m[i] - a.m[j];
            prod *= phi_fn({neg_ieta + dx, dm}, mp, cfg);
            prod *= phi_fn({neg_ieta - dx, -dm}, mp, cfg);
        }
    return prod;
}

// Crossed edge weight. The square roots take the principal branch per
// spin; relation checks use ratios in which the branch cancels.
inline cplx wbar_weight(cplx alpha, const Spin& a, const Spin& b,
                        const LatticeParams& lp,
                        const NumericsConfig& cfg = {}) {
    const cplx root = std::sqrt(self_weight(a, lp.modular, cfg)) *
                      std::sqrt(self_weight(b, lp.modular, cfg));
    return root * w_weight(lp.eta() - alpha, a, b, lp.modular, cfg);
}

namespace detail {

// Self-interaction evaluated through the collapsed-guard denominator.
// Exact zeros of the weight (coinciding components on a quadrature node)
// flag `hit` instead of throwing.
inline cplx guarded_self_weight(const Spin& a, const ModularParams& mp,
                                const NumericsConfig& cfg, bool& hit) {
    DenominatorGamma dg(mp, cfg);
    cplx den{1.0, 0.0};
    for (int i = 0; i < a.size() && !dg.hit_pole; ++i)
        for (int j = i + 1; j < a.size() && !dg.hit_pole; ++j) {
            const double dx = a.x[i] - a.x[j];
            const int dm = a.m[i] - a.m[j];
            den *= dg(dx, dm);
            den *= dg(-dx, -dm);
        }
    if (dg.hit_pole) {
        hit = true;
        return cplx{0.0, 0.0};
    }
    return 1.0 / den;
}

} // namespace detail

// Normalized spin measure: sum over the free discrete components with the
// last one absorbing the constraint, times the periodic integral over the
// free continuous components with the dependent one carrying the exact
// negative sum. No overall prefactor, so the unit functional integrates
// to r^(n-1).
template <typename F>
ValueWithError spin_integrate(F&& f, int n, int r,
                              const NumericsConfig& cfg = {}) {
    if (n < 1) throw config_error("spin_integrate: n must be >= 1");
    if (r < 1) throw config_error("spin_integrate: r must be >= 1");
    if (n == 1) {
        Spin pinned;
        pinned.x = {0.0};
        pinned.m = {0};
        return {f(pinned), 0.0, 0, true};
    }

    const auto frees = enumerate_tuples(n - 1, r);
    ContourSpec spec;
    spec.dim = n - 1;
    spec.imag_offsets.assign(n - 1, 0.0);

    auto g = [&, n, r](const std::vector<cplx>& zf) {
        Spin s;
        s.x.resize(n);
        s.m.resize(n);
        double sum = 0.0;
        for (int j = 0; j + 1 < n; ++j) {
            s.x[j] = zf[j].real();
            sum += s.x[j];
        }
        s.x[n - 1] = -sum;
        cplx acc{0.0, 0.0};
        for (const auto& mt : frees) {
            int msum = 0;
            for (int j = 0; j + 1 < n; ++j) {
                s.m[j] = mt[j];
                msum += mt[j];
            }
            s.m[n - 1] = canonical_mod(-msum, r);
            acc += f(s);
        }
        return acc;
    };
    return refine_until(g, spec, cfg);
}

// Four-edge star weight: the internal spin is integrated out against the
// product of two crossed and two plain edge weights. The two kinds differ
// by the orientation of every edge.
inline ValueWithError irf_weight(int kind, const Spin& si, const Spin& sj,
                                 const Spin& sk, const Spin& sl,
                                 const LatticeParams& lp,
                                 const NumericsConfig& cfg = {}) {
    lp.validate();
    if (kind != 1 && kind != 2)
        throw config_error("irf_weight: kind must be 1 or 2");
    const int r = lp.modular.r;
    for (const Spin* s : {&si, &sj, &sk, &sl}) {
        s->validate(r);
        if (s->size() != lp.n)
            throw config_error("irf_weight: spin length must equal n");
    }
    const ModularParams& mp = lp.modular;
    const cplx eta = lp.eta();
    const cplx a_kh = eta - (lp.u - lp.v);
    const cplx a_jh = eta - (lp.up - lp.vp);
    const cplx a_hi = lp.up - lp.v;
    const cplx a_hl = lp.u - lp.vp;

    auto integrand = [&](const Spin& h) {
        bool hit = false;
        const cplx sh = detail::guarded_self_weight(h, mp, cfg, hit);
        if (hit) return cplx{0.0, 0.0};
        if (kind == 1)
            return sh * w_weight(a_kh, sk, h, mp, cfg) *
                   w_weight(a_jh, sj, h, mp, cfg) *
                   w_weight(a_hi, h, si, mp, cfg) *
                   w_weight(a_hl, h, sl, mp, cfg);
        return sh * w_weight(a_kh, h, sj, mp, cfg) *
               w_weight(a_jh, h, sk, mp, cfg) *
               w_weight(a_hi, sl, h, mp, cfg) *
               w_weight(a_hl, si, h, mp, cfg);
    };

    ValueWithError out = spin_integrate(integrand, lp.n, r, cfg);
    out.value *= std::sqrt(self_weight(sj, mp, cfg)) *
                 std::sqrt(self_weight(sk, mp, cfg));
    return out;
}

namespace detail {

inline nlohmann::json jspin(const Spin& s) {
    return nlohmann::json{{"x", s.x}, {"m", s.m}};
}

// Corner spin with pairwise-separated continuous components: every
// difference stays clear of the integer lattice, so the self-weights and
// prefactor edges are guard-safe.
inline Spin sample_spin(Rng& rng, int n, int r) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Spin s;
        double sum = 0.0;
        int msum = 0;
        for (int j = 0; j + 1 < n; ++j) {
            s.x.push_back(rng.uniform(0.05, 0.95));
            sum += s.x.back();
            s.m.push_back(rng.below(r));
            msum += s.m.back();
        }
        s.x.push_back(-sum);
        s.m.push_back(canonical_mod(-msum, r));
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j) {
                const double d = s.x[i] - s.x[j];
                ok = std::abs(d - std::round(d)) > 0.05;
            }
        if (ok) return s;
    }
    throw sampler_error(
        "sample_spin: no separated configuration after 64 attempts");
}

} // namespace detail

// Field map from one star onto the A-type family: edge rapidities and the
// four corner spins populate the two flavor blocks.
inline FlavorVectorAn star_to_an(const Spin& si, const Spin& sj,
                                 const Spin& sk, const Spin& sl,
                                 const LatticeParams& lp) {
    const int n = lp.n;
    FlavorVectorAn fv;
    fv.m = n - 1;
    fv.n = n - 1;
    fv.t.resize(2 * n);
    fv.s.resize(2 * n);
    fv.a.resize(2 * n);
    fv.b.resize(2 * n);
    const cplx i1{0.0, 1.0};
    const cplx eta = lp.eta();
    for (int j = 0; j < n; ++j) {
        fv.t[j] = i1 * (lp.u - lp.v) - sk.x[j];
        fv.t[n + j] = i1 * (lp.up - lp.vp) - sj.x[j];
        fv.s[j] = -i1 * (lp.up - lp.v - eta) + si.x[j];
        fv.s[n + j] = -i1 * (lp.u - lp.vp - eta) + sl.x[j];
        fv.a[j] = -sk.m[j];
        fv.a[n + j] = -sj.m[j];
        fv.b[j] = si.m[j];
        fv.b[n + j] = sl.m[j];
    }
    fv.Z = cplx{0.0, 0.0};
    fv.Y = 0;
    return fv;
}

// Same map for the mirrored star.
inline FlavorVectorAn star_to_an_mirror(const Spin& si, const Spin& sj,
                                        const Spin& sk, const Spin& sl,
                                        const LatticeParams& lp) {
    const int n = lp.n;
    FlavorVectorAn fv;
    fv.m = n - 1;
    fv.n = n - 1;
    fv.t.resize(2 * n);
    fv.s.resize(2 * n);
    fv.a.resize(2 * n);
    fv.b.resize(2 * n);
    const cplx i1{0.0, 1.0};
    const cplx eta = lp.eta();
    for (int j = 0; j < n; ++j) {
        fv.t[j] = -i1 * (lp.up - lp.v - eta) - sl.x[j];
        fv.t[n + j] = -i1 * (lp.u - lp.vp - eta) - si.x[j];
        fv.s[j] = i1 * (lp.u - lp.v) + sj.x[j];
        fv.s[n + j] = i1 * (lp.up - lp.vp) + sk.x[j];
        fv.a[j] = -sl.m[j];
        fv.a[n + j] = -si.m[j];
        fv.b[j] = sj.m[j];
        fv.b[n + j] = sk.m[j];
    }
    fv.Z = cplx{0.0, 0.0};
    fv.Y = 0;
    return fv;
}

// Star-star relation at sampled spins and complexified rapidities, with
// three cross-checks riding along: both star weights against their A-type
// sum/integral form, the prefactor ratio against the flavor cross
// product, and the exact algebraic consistency of the two field maps.
inline VerificationReport verify_star_star(int n, int r, std::uint64_t seed,
                                           const NumericsConfig& cfg = {},
                                           double tol = 0.0) {
    if (n < 1) throw config_error("verify_star_star: n must be >= 1");
    const double tol_eff = tol > 0.0 ? tol : (n == 1 ? 1e-12 : 1e-5);
    return detail::timed("star_star", seed, tol_eff, [&](VerificationReport&
                                                             rep) {
        Rng rng(seed);
        const ModularParams mp = detail::draw_modular_params(rng, r);
        const double H = mp.strip_height();
        LatticeParams lp;
        lp.modular = mp;
        lp.n = n;
        lp.u = cplx{0.15 * H, rng.uniform(-0.02, 0.02)};
        lp.v = cplx{0.0, rng.uniform(-0.02, 0.02)};
        lp.up = cplx{0.18 * H, rng.uniform(-0.02, 0.02)};
        lp.vp = cplx{-0.02 * H, rng.uniform(-0.02, 0.02)};

        const Spin si = detail::sample_spin(rng, n, r);
        const Spin sj = detail::sample_spin(rng, n, r);
        const Spin sk = detail::sample_spin(rng, n, r);
        const Spin sl = detail::sample_spin(rng, n, r);

        const ValueWithError w1 = irf_weight(1, si, sj, sk, sl, lp, cfg);
        const ValueWithError w2 = irf_weight(2, si, sj, sk, sl, lp, cfg);
        const cplx pre1 = w_weight(lp.vp - lp.v, sl, sk, mp, cfg) *
                          w_weight(lp.up - lp.u, sl, sj, mp, cfg);
        const cplx pre2 = w_weight(lp.vp - lp.v, sj, si, mp, cfg) *
                          w_weight(lp.up - lp.u, sk, si, mp, cfg);
        rep.lhs = pre1 * w1.value;
        rep.rhs = pre2 * w2.value;
        rep.quad_err_lhs = w1.est_rel_error;
        rep.quad_err_rhs = w2.est_rel_error;

        auto rel = [](cplx got, cplx want) {
            return std::abs(got - want) / std::max(std::abs(want), 1e-300);
        };

        // Route through the A-type sum/integral: the star weight equals
        // the root prefactor times n!/lambda^(n-1) times the family value.
        const FlavorVectorAn fv = star_to_an(si, sj, sk, sl, lp);
        const FlavorVectorAn fw = star_to_an_mirror(si, sj, sk, sl, lp);
        const cplx root = std::sqrt(self_weight(sj, mp, cfg)) *
                          std::sqrt(self_weight(sk, mp, cfg));
        cplx scale = root;
        for (int k = 2; k <= n; ++k) scale *= static_cast<double>(k);
        scale /= ipow(lambda_const(mp, cfg), n - 1);
        const double w1_route =
            rel(w1.value, scale * an_sum_integral(fv, mp, cfg).value);
        const double w2_route =
            rel(w2.value, scale * an_sum_integral(fw, mp, cfg).value);

        // Prefactor ratio against the flavor cross product.
        const double fac_err =
            rel(pre2 / pre1, an_cross_product(fv, mp, cfg));

        // Exact map consistency: transform, recenter, swap, and the block
        // exchange reproduce the mirrored fields.
        const FlavorVectorAn cand = an_swapped(an_shifted(
            an_transformed(fv, mp), an_total_t(fv) / static_cast<double>(n),
            0));
        double map_err = std::abs(cand.Z - fw.Z);
        bool labels_ok = canonical_mod(cand.Y - fw.Y, r) == 0;
        for (int j = 0; j < 2 * n; ++j) {
            const int pj = (j + n) % (2 * n);
            map_err = std::max(map_err, std::abs(cand.t[pj] - fw.t[j]));
            map_err = std::max(map_err, std::abs(cand.s[pj] - fw.s[j]));
            labels_ok = labels_ok &&
                        canonical_mod(cand.a[pj] - fw.a[j], r) == 0 &&
                        canonical_mod(cand.b[pj] - fw.b[j], r) == 0;
        }

        rep.params = {{"n", n},
                      {"r", r},
                      {"modular", detail::jmp(mp)},
                      {"u", detail::jc(lp.u)},
                      {"v", detail::jc(lp.v)},
                      {"up", detail::jc(lp.up)},
                      {"vp", detail::jc(lp.vp)},
                      {"spin_i", detail::jspin(si)},
                      {"spin_j", detail::jspin(sj)},
                      {"spin_k", detail::jspin(sk)},
                      {"spin_l", detail::jspin(sl)},
                      {"w1_route_rel", w1_route},
                      {"w2_route_rel", w2_route},
                      {"prefactor_ratio_rel", fac_err},
                      {"map_consistency_abs", map_err},
                      {"map_labels_consistent", labels_ok}};
    });
}

} // namespace lensehg

#endif // LENSEHG_LATTICE_HPP

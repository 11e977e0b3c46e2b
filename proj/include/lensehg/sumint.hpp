#pragma once

// Constrained sums of contour integrals over products of lens gamma
// functions: the A-type family (hyperplane-constrained variables, one
// discrete label sum per free variable) and the BC-type family
// (reflection-symmetric integrand, unconstrained label sums), together
// with their field transforms, shift covariance and cross products.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <vector>

#include "lensehg/kernel.hpp"
#include "lensehg/modular.hpp"
#include "lensehg/quadrature.hpp"

namespace lensehg {

// Fields of the A-type sum/integral I^m_{A_n}(Z, Y | t, a; s, b):
// m + n + 2 flavor pairs on each side, a total complex constraint Z on the
// n + 1 integration variables and a total label constraint Y mod r.
struct FlavorVectorAn {
    int m = 0;
    int n = 0;
    std::vector<cplx> t, s; // size m + n + 2 each
    std::vector<int> a, b;  // size m + n + 2 each
    cplx Z{0.0, 0.0};
    int Y = 0;

    int flavors() const { return m + n + 2; }

    void validate(const ModularParams& mp) const {
        mp.validate();
        if (m < 0 || n < 0) throw config_error("FlavorVectorAn: m, n must be >= 0");
        const std::size_t K = static_cast<std::size_t>(flavors());
        if (t.size() != K || s.size() != K || a.size() != K || b.size() != K)
            throw config_error("FlavorVectorAn: field size must be m + n + 2");
        const cplx res = std::accumulate(t.begin(), t.end(), cplx{}) +
                         std::accumulate(s.begin(), s.end(), cplx{}) -
                         static_cast<double>(m + 1) * (mp.sigma + mp.tau);
        const double period = 2.0 * mp.r;
        const double re_mod = res.real() - period * std::round(res.real() / period);
        if (std::abs(re_mod) > 1e-12 || std::abs(res.imag()) > 1e-12) {
            std::ostringstream os;
            os << "FlavorVectorAn: balancing residual " << re_mod << " + "
               << res.imag() << "i exceeds 1e-12 "
               << "(sum of t and s must equal (m+1)(sigma+tau) mod 2r)";
            throw config_error(os.str());
        }
        const int ires = std::accumulate(a.begin(), a.end(), 0) +
                         std::accumulate(b.begin(), b.end(), 0);
        if (canonical_mod(ires, mp.r) != 0)
            throw config_error(
                "FlavorVectorAn: label balancing (sum of a and b mod r) violated");
    }
};

// Fields of the BC-type sum/integral I^m_{BC_n}(t, a): 2m + 2n + 4 flavor
// pairs, n integration variables on the base contour.
struct FlavorVectorBCn {
    int m = 0;
    int n = 0;
    std::vector<cplx> t; // size 2(m + n + 2)
    std::vector<int> a;

    int flavors() const { return 2 * (m + n + 2); }

    void validate(const ModularParams& mp) const {
        mp.validate();
        if (m < 0 || n < 0)
            throw config_error("FlavorVectorBCn: m, n must be >= 0");
        const std::size_t K = static_cast<std::size_t>(flavors());
        if (t.size() != K || a.size() != K)
            throw config_error("FlavorVectorBCn: field size must be 2(m + n + 2)");
        const cplx res = std::accumulate(t.begin(), t.end(), cplx{}) -
                         static_cast<double>(m + 1) * (mp.sigma + mp.tau);
        const double period = 2.0 * mp.r;
        const double re_mod = res.real() - period * std::round(res.real() / period);
        if (std::abs(re_mod) > 1e-12 || std::abs(res.imag()) > 1e-12)
            throw config_error(
                "FlavorVectorBCn: balancing residual exceeds 1e-12 "
                "(sum of t must equal (m+1)(sigma+tau) mod 2r)");
        const int ires = std::accumulate(a.begin(), a.end(), 0);
        if (canonical_mod(ires, mp.r) != 0)
            throw config_error(
                "FlavorVectorBCn: label balancing (sum of a mod r) violated");
    }
};

// All label tuples in {0, ..., r-1}^len, ascending lexicographic order.
inline std::vector<std::vector<int>> enumerate_tuples(int len, int r) {
    std::vector<std::vector<int>> out;
    if (len == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> cur(len, 0);
    for (;;) {
        out.push_back(cur);
        int a = len - 1;
        while (a >= 0 && cur[a] == r - 1) cur[a--] = 0;
        if (a < 0) break;
        ++cur[a];
    }
    return out;
}

// Tuples of length `len` whose entries sum to `target` mod r: the first
// len - 1 entries run free, the last is determined.
inline std::vector<std::vector<int>> enumerate_tuples_sum(int len, int r,
                                                          int target) {
    std::vector<std::vector<int>> out = enumerate_tuples(len - 1, r);
    for (auto& tup : out) {
        const int partial = std::accumulate(tup.begin(), tup.end(), 0);
        tup.push_back(canonical_mod(target - partial, r));
    }
    return out;
}

namespace detail {

// Denominator gamma factors vanish nowhere on the contours used here, but
// their poles (which are zeros of the full integrand) can sit exactly on
// quadrature nodes. Those evaluations run with the guard band collapsed,
// and an exact hit maps to integrand value zero.
struct DenominatorGamma {
    const ModularParams& mp;
    NumericsConfig cfg;
    bool hit_pole = false;

    DenominatorGamma(const ModularParams& mp_, const NumericsConfig& base)
        : mp(mp_), cfg(base) {
        cfg.pole_guard = 1e-13;
    }

    cplx operator()(cplx z, int m) {
        if (hit_pole) return 1.0;
        try {
            return lens_gamma({z, m}, mp, cfg);
        } catch (const pole_error&) {
            hit_pole = true;
            return 1.0;
        }
    }
};

} // namespace detail

// Integrand of the A-type family at one point of the constrained variable
// space: zs and ys carry all n + 1 components (the caller enforces the
// constraints).
inline cplx an_integrand(const std::vector<cplx>& zs, const std::vector<int>& ys,
                         const FlavorVectorAn& fv, const ModularParams& mp,
                         const NumericsConfig& cfg) {
    const int N = fv.n + 1;
    const int K = fv.flavors();
    cplx num{1.0, 0.0};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < K; ++j) {
            num *= lens_gamma({fv.t[j] + zs[i], fv.a[j] + ys[i]}, mp, cfg);
            num *= lens_gamma({fv.s[j] - zs[i], fv.b[j] - ys[i]}, mp, cfg);
        }
    detail::DenominatorGamma dg(mp, cfg);
    cplx den{1.0, 0.0};
    for (int i = 0; i < N && !dg.hit_pole; ++i)
        for (int j = i + 1; j < N && !dg.hit_pole; ++j) {
            den *= dg(zs[i] - zs[j], ys[i] - ys[j]);
            den *= dg(zs[j] - zs[i], ys[j] - ys[i]);
        }
    if (dg.hit_pole) return cplx{0.0, 0.0};
    return num / den;
}

// Worst-case vertical margin between the contour of the A-type integral
// and the nearest pole or zero shell of any numerator gamma factor.
// Nonpositive values mean the contour is invalid.
inline double an_pole_margin(const FlavorVectorAn& fv, const ModularParams& mp) {
    const double H = mp.strip_height();
    const double off = fv.Z.imag() / (fv.n + 1);
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < fv.flavors(); ++j) {
        const double ht = fv.t[j].imag() + off;
        const double hs = fv.s[j].imag() - off;
        margin = std::min({margin, ht, H - ht, hs, H - hs});
    }
    return margin;
}

// Evaluate I^m_{A_n}(Z, Y | t, a; s, b). For n = 0 this is a finite
// product; otherwise a sum over label tuples of an n-fold contour
// integral, refined by node doubling.
inline ValueWithError an_sum_integral(const FlavorVectorAn& fv,
                                      const ModularParams& mp,
                                      const NumericsConfig& cfg) {
    fv.validate(mp);
    cfg.validate();
    if (fv.n == 0) {
        cplx prod{1.0, 0.0};
        for (int j = 0; j < fv.flavors(); ++j) {
            prod *= lens_gamma({fv.t[j] + fv.Z, fv.a[j] + fv.Y}, mp, cfg);
            prod *= lens_gamma({fv.s[j] - fv.Z, fv.b[j] - fv.Y}, mp, cfg);
        }
        return {prod, 0.0, 0, true};
    }

    const double margin = an_pole_margin(fv, mp);
    if (margin <= cfg.pole_guard) {
        std::ostringstream os;
        os << "an_sum_integral: contour margin " << margin
           << " does not clear the pole guard " << cfg.pole_guard
           << "; a numerator gamma factor has a singularity too close to "
              "the integration contour";
        throw contour_error(os.str());
    }

    const int N = fv.n + 1;
    const double off = fv.Z.imag() / N;
    ContourSpec spec;
    spec.dim = fv.n;
    spec.imag_offsets.assign(fv.n, off);

    const auto tuples = enumerate_tuples_sum(N, mp.r, canonical_mod(fv.Y, mp.r));
    auto f = [&](const std::vector<cplx>& zfree) {
        std::vector<cplx> zs(N);
        for (int i = 0; i < fv.n; ++i) zs[i] = zfree[i];
        zs[fv.n] = fv.Z - std::accumulate(zfree.begin(), zfree.end(), cplx{});
        cplx acc{0.0, 0.0};
        for (const auto& ys : tuples) acc += an_integrand(zs, ys, fv, mp, cfg);
        return acc;
    };

    ValueWithError out = refine_until(f, spec, cfg);
    cplx pref = ipow(lambda_const(mp, cfg), fv.n);
    for (int k = 2; k <= N; ++k) pref /= static_cast<double>(k);
    out.value *= pref;
    return out;
}

// Sum of each field vector.
inline cplx an_total_t(const FlavorVectorAn& fv) {
    return std::accumulate(fv.t.begin(), fv.t.end(), cplx{});
}
inline cplx an_total_s(const FlavorVectorAn& fv) {
    return std::accumulate(fv.s.begin(), fv.s.end(), cplx{});
}
inline int an_total_a(const FlavorVectorAn& fv) {
    return std::accumulate(fv.a.begin(), fv.a.end(), 0);
}
inline int an_total_b(const FlavorVectorAn& fv) {
    return std::accumulate(fv.b.begin(), fv.b.end(), 0);
}

// Field map of the A-type transform identity: the value of the original
// sum/integral equals the value at the transformed fields times
// an_cross_product.
inline FlavorVectorAn an_transformed(const FlavorVectorAn& fv,
                                     const ModularParams& mp) {
    FlavorVectorAn out;
    out.m = fv.n;
    out.n = fv.m;
    out.Z = fv.Z + an_total_t(fv);
    out.Y = fv.Y + an_total_a(fv);
    const cplx st = mp.sigma + mp.tau;
    out.t.reserve(fv.t.size());
    out.s.reserve(fv.s.size());
    for (const cplx& v : fv.t) out.t.push_back(-v);
    for (const cplx& v : fv.s) out.s.push_back(st - v);
    for (int v : fv.a) out.a.push_back(-v);
    for (int v : fv.b) out.b.push_back(-v);
    return out;
}

// prod_{i,j} lens_gamma(t_i + s_j, a_i + b_j) over all flavor pairs.
inline cplx an_cross_product(const FlavorVectorAn& fv, const ModularParams& mp,
                             const NumericsConfig& cfg) {
    cplx prod{1.0, 0.0};
    for (int i = 0; i < fv.flavors(); ++i)
        for (int j = 0; j < fv.flavors(); ++j)
            prod *= lens_gamma({fv.t[i] + fv.s[j], fv.a[i] + fv.b[j]}, mp, cfg);
    return prod;
}

// Shift covariance: the value is invariant under this reparametrisation
// for any complex c and integer k.
inline FlavorVectorAn an_shifted(const FlavorVectorAn& fv, cplx c, int k) {
    FlavorVectorAn out = fv;
    const int N = fv.n + 1;
    for (auto& v : out.t) v += c;
    for (auto& v : out.s) v -= c;
    for (auto& v : out.a) v += k;
    for (auto& v : out.b) v -= k;
    out.Z = fv.Z - static_cast<double>(N) * c;
    out.Y = fv.Y - N * k;
    return out;
}

// Exchange symmetry: I(Z, Y | t, a; s, b) = I(-Z, -Y | s, b; t, a).
inline FlavorVectorAn an_swapped(const FlavorVectorAn& fv) {
    FlavorVectorAn out = fv;
    std::swap(out.t, out.s);
    std::swap(out.a, out.b);
    out.Z = -fv.Z;
    out.Y = -fv.Y;
    return out;
}

// Integrand of the BC-type family at one point; zs and ys carry the n
// free components.
inline cplx bcn_integrand(const std::vector<cplx>& zs, const std::vector<int>& ys,
                          const FlavorVectorBCn& fv, const ModularParams& mp,
                          const NumericsConfig& cfg) {
    const int N = fv.n;
    const int K = fv.flavors();
    cplx num{1.0, 0.0};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < K; ++j) {
            num *= lens_gamma({fv.t[j] + zs[i], fv.a[j] + ys[i]}, mp, cfg);
            num *= lens_gamma({fv.t[j] - zs[i], fv.a[j] - ys[i]}, mp, cfg);
        }
    detail::DenominatorGamma dg(mp, cfg);
    cplx den{1.0, 0.0};
    for (int i = 0; i < N && !dg.hit_pole; ++i) {
        den *= dg(2.0 * zs[i], 2 * ys[i]);
        den *= dg(-2.0 * zs[i], -2 * ys[i]);
    }
    for (int i = 0; i < N && !dg.hit_pole; ++i)
        for (int j = i + 1; j < N && !dg.hit_pole; ++j) {
            den *= dg(zs[i] - zs[j], ys[i] - ys[j]);
            den *= dg(zs[j] - zs[i], ys[j] - ys[i]);
            den *= dg(zs[i] + zs[j], ys[i] + ys[j]);
            den *= dg(-zs[i] - zs[j], -ys[i] - ys[j]);
        }
    if (dg.hit_pole) return cplx{0.0, 0.0};
    return num / den;
}

inline double bcn_pole_margin(const FlavorVectorBCn& fv,
                              const ModularParams& mp) {
    const double H = mp.strip_height();
    double margin = std::numeric_limits<double>::infinity();
    for (const cplx& tj : fv.t)
        margin = std::min({margin, tj.imag(), H - tj.imag()});
    return margin;
}

// Evaluate I^m_{BC_n}(t, a): label sums are unconstrained over
// {0, ..., r-1}^n, the contour is the base torus cycle for every axis.
inline ValueWithError bcn_sum_integral(const FlavorVectorBCn& fv,
                                       const ModularParams& mp,
                                       const NumericsConfig& cfg) {
    fv.validate(mp);
    cfg.validate();
    if (fv.n == 0) return {cplx{1.0, 0.0}, 0.0, 0, true};

    const double margin = bcn_pole_margin(fv, mp);
    if (margin <= cfg.pole_guard) {
        std::ostringstream os;
        os << "bcn_sum_integral: contour margin " << margin
           << " does not clear the pole guard " << cfg.pole_guard;
        throw contour_error(os.str());
    }

    ContourSpec spec;
    spec.dim = fv.n;
    spec.imag_offsets.assign(fv.n, 0.0);

    const auto tuples = enumerate_tuples(fv.n, mp.r);
    auto f = [&](const std::vector<cplx>& zfree) {
        cplx acc{0.0, 0.0};
        for (const auto& ys : tuples)
            acc += bcn_integrand(zfree, ys, fv, mp, cfg);
        return acc;
    };

    ValueWithError out = refine_until(f, spec, cfg);
    cplx pref = ipow(lambda_const(mp, cfg), fv.n);
    for (int k = 1; k <= fv.n; ++k) pref /= 2.0 * k;
    out.value *= pref;
    return out;
}

// Field map of the BC-type transform identity.
inline FlavorVectorBCn bcn_transformed(const FlavorVectorBCn& fv,
                                       const ModularParams& mp) {
    FlavorVectorBCn out;
    out.m = fv.n;
    out.n = fv.m;
    const cplx half_st = 0.5 * (mp.sigma + mp.tau);
    out.t.reserve(fv.t.size());
    for (const cplx& v : fv.t) out.t.push_back(half_st - v);
    for (int v : fv.a) out.a.push_back(-v);
    return out;
}

// prod_{i<j} lens_gamma(t_i + t_j, a_i + a_j).
inline cplx bcn_cross_product(const FlavorVectorBCn& fv,
                              const ModularParams& mp,
                              const NumericsConfig& cfg) {
    cplx prod{1.0, 0.0};
    for (int i = 0; i < fv.flavors(); ++i)
        for (int j = i + 1; j < fv.flavors(); ++j)
            prod *= lens_gamma({fv.t[i] + fv.t[j], fv.a[i] + fv.a[j]}, mp, cfg);
    return prod;
}

// A BC-type integral with one variable is an A-type integral with the
// flavor list split in half and both total constraints at zero.
inline FlavorVectorAn bcn1_as_an(const FlavorVectorBCn& fv) {
    if (fv.n != 1)
        throw config_error("bcn1_as_an: defined for n = 1 only");
    FlavorVectorAn out;
    out.m = fv.m;
    out.n = 1;
    const int K = fv.m + 3; // flavors per side of the A-type family
    out.t.assign(fv.t.begin(), fv.t.begin() + K);
    out.s.assign(fv.t.begin() + K, fv.t.end());
    out.a.assign(fv.a.begin(), fv.a.begin() + K);
    out.b.assign(fv.a.begin() + K, fv.a.end());
    out.Z = cplx{0.0, 0.0};
    out.Y = 0;
    return out;
}

} // namespace lensehg

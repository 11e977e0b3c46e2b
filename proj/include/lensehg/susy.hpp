#ifndef LENSEHG_SUSY_HPP
#define LENSEHG_SUSY_HPP

// Gauge-theory layer: electric and magnetic lens-space indices of SQCD
// with unitary or symplectic gauge group, assembled by mapping physical
// data (ranks, flavor count, fugacities, holonomies) onto the constrained
// sum/integral families, plus a numerical comparison of the dual pair.

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "identities.hpp"
#include "kernel.hpp"
#include "modular.hpp"
#include "rng.hpp"
#include "sumint.hpp"

namespace lensehg {

enum class GaugeGroup { SU, Sp };

// Physical data of one SQCD theory on the lens space. For the unitary
// group the flavor symmetry has two independent factors (t_bar/a_bar for
// quarks, s_bar/b_bar for antiquarks, Nf entries each) plus a baryonic
// fugacity/holonomy pair; for the symplectic group there is a single
// 2*Nf-entry list and no baryonic charge.
struct GaugeTheorySpec {
    GaugeGroup group = GaugeGroup::SU;
    int Nc = 2;
    int Nf = 3;
    int r = 1;
    cplx sigma{0.0, 0.3};
    cplx tau{0.0, 0.3};
    std::vector<cplx> t_bar, s_bar; // traceless flavor fugacities
    std::vector<int> a_bar, b_bar;  // flavor holonomies in {0, ..., r-1}
    cplx baryon{0.0, 0.01};         // baryonic fugacity (SU only)
    int n_B = 0;                    // baryonic holonomy (SU only)

    ModularParams modular() const { return {sigma, tau, r}; }

    // R-symmetry fugacity, fixed by the modular parameters.
    cplx r_weight() const { return 0.5 * (tau + sigma); }

    // Rank parameter of the dual gauge group.
    int dual_rank() const {
        return group == GaugeGroup::SU ? Nf - Nc : Nf - Nc - 2;
    }

    // R-charge of a quark in this theory.
    double quark_r_charge() const {
        const double nf = static_cast<double>(Nf);
        return group == GaugeGroup::SU ? 1.0 - Nc / nf : 1.0 - (Nc + 1) / nf;
    }

    void validate() const {
        modular().validate();
        const bool su = group == GaugeGroup::SU;
        if (su && Nc < 2)
            throw config_error("GaugeTheorySpec: SU rank Nc must be >= 2");
        if (!su && Nc < 1)
            throw config_error("GaugeTheorySpec: Sp rank Nc must be >= 1");
        if (su && Nf <= Nc)
            throw config_error("GaugeTheorySpec: SU requires Nf > Nc");
        if (!su && Nf <= Nc + 1)
            throw config_error("GaugeTheorySpec: Sp requires Nf > Nc + 1");

        const std::size_t F = static_cast<std::size_t>(su ? Nf : 2 * Nf);
        if (t_bar.size() != F || a_bar.size() != F)
            throw config_error(
                "GaugeTheorySpec: quark fugacity/holonomy lists have the "
                "wrong length");
        if (su && (s_bar.size() != F || b_bar.size() != F))
            throw config_error(
                "GaugeTheorySpec: antiquark fugacity/holonomy lists have "
                "the wrong length");
        if (!su && (!s_bar.empty() || !b_bar.empty()))
            throw config_error(
                "GaugeTheorySpec: the symplectic theory has a single "
                "flavor list; s_bar and b_bar must be empty");

        auto check_traceless = [](const std::vector<cplx>& v,
                                  const char* which) {
            const cplx s = std::accumulate(v.begin(), v.end(), cplx{});
            if (std::abs(s) > 1e-12) {
                std::ostringstream os;
                os << "GaugeTheorySpec: " << which
                   << " fugacities must be traceless (|sum| = " << std::abs(s)
                   << ")";
                throw config_error(os.str());
            }
        };
        auto check_holonomies = [this](const std::vector<int>& v,
                                       const char* which) {
            int s = 0;
            for (int h : v) {
                if (h < 0 || h >= r)
                    throw config_error(std::string("GaugeTheorySpec: ") +
                                       which +
                                       " holonomies must lie in {0, ..., r-1}");
                s += h;
            }
            if (canonical_mod(s, r) != 0)
                throw config_error(std::string("GaugeTheorySpec: ") + which +
                                   " holonomies must sum to 0 mod r");
        };
        check_traceless(t_bar, "quark");
        check_holonomies(a_bar, "quark");
        if (su) {
            check_traceless(s_bar, "antiquark");
            check_holonomies(b_bar, "antiquark");
            if (n_B % (Nf - Nc) != 0)
                throw config_error(
                    "n_B must be an integer multiple of Nf-Nc");
        }
    }
};

// ---------------------------------------------------------------------
// SU(Nc) with Nf flavors
// ---------------------------------------------------------------------

// Electric index data: quarks and antiquarks weighted by the R-charge and
// the baryonic charge, trace constraints at zero.
inline FlavorVectorAn map_su_electric(const GaugeTheorySpec& g) {
    g.validate();
    if (g.group != GaugeGroup::SU)
        throw config_error("map_su_electric: spec is not an SU theory");
    FlavorVectorAn fv;
    fv.m = g.Nf - g.Nc - 1;
    fv.n = g.Nc - 1;
    const cplx rw = g.quark_r_charge() * g.r_weight();
    // Each label only matters mod r inside the integrand, but the dual map
    // divides the label totals by the dual rank, so the representative
    // choice matters there. Pick the representative whose flavor trace is
    // exactly zero as an integer: the label totals then sit entirely in
    // the baryonic charge, matching the continuous trace split.
    int asum = 0, bsum = 0;
    for (int j = 0; j + 1 < g.Nf; ++j) {
        asum += g.a_bar[j];
        bsum += g.b_bar[j];
    }
    for (int j = 0; j < g.Nf; ++j) {
        const int abar = (j + 1 < g.Nf) ? g.a_bar[j] : -asum;
        const int bbar = (j + 1 < g.Nf) ? g.b_bar[j] : -bsum;
        fv.t.push_back(g.t_bar[j] + rw + g.baryon);
        fv.s.push_back(g.s_bar[j] + rw - g.baryon);
        fv.a.push_back(abar + g.n_B);
        fv.b.push_back(bbar - g.n_B);
    }
    fv.Z = cplx{0.0, 0.0};
    fv.Y = 0;
    return fv;
}

namespace detail {

// Reflection of every field through the per-flavor share of the totals,
// splitting the flavor count against the dual rank. An involution: two
// applications with complementary ranks restore the input.
inline FlavorVectorAn su_tilde_fields(const FlavorVectorAn& fv,
                                      int dual_rank) {
    const int K = fv.flavors();
    if (dual_rank < 1 || dual_rank >= K)
        throw config_error("su_tilde_fields: dual rank out of range");
    const int A = an_total_a(fv);
    const int Bs = an_total_b(fv);
    if (A % dual_rank != 0 || Bs % dual_rank != 0)
        throw config_error(
            "su_tilde_fields: holonomy totals are not divisible by the "
            "dual rank (baryonic holonomy quantization violated)");
    FlavorVectorAn out;
    out.m = K - dual_rank - 1;
    out.n = dual_rank - 1;
    const cplx tshare = an_total_t(fv) / static_cast<double>(dual_rank);
    const cplx sshare = an_total_s(fv) / static_cast<double>(dual_rank);
    const int ashare = A / dual_rank;
    const int bshare = Bs / dual_rank;
    for (int j = 0; j < K; ++j) {
        out.t.push_back(tshare - fv.t[j]);
        out.s.push_back(sshare - fv.s[j]);
        out.a.push_back(ashare - fv.a[j]);
        out.b.push_back(bshare - fv.b[j]);
    }
    out.Z = fv.Z;
    out.Y = fv.Y;
    return out;
}

} // namespace detail

// Magnetic index data: the dual gauge group has rank Nf - Nc and sees the
// reflected fields.
inline FlavorVectorAn map_su_magnetic(const GaugeTheorySpec& g) {
    return detail::su_tilde_fields(map_su_electric(g), g.dual_rank());
}

inline ValueWithError su_electric_index(const GaugeTheorySpec& g,
                                        const NumericsConfig& cfg = {}) {
    return an_sum_integral(map_su_electric(g), g.modular(), cfg);
}

// Gauge-singlet meson contribution of the magnetic theory: one gamma
// factor per quark-antiquark pair.
inline cplx su_meson_product(const GaugeTheorySpec& g,
                             const NumericsConfig& cfg = {}) {
    return an_cross_product(map_su_electric(g), g.modular(), cfg);
}

inline ValueWithError su_magnetic_index(const GaugeTheorySpec& g,
                                        const NumericsConfig& cfg = {}) {
    ValueWithError out = an_sum_integral(map_su_magnetic(g), g.modular(), cfg);
    out.value *= su_meson_product(g, cfg);
    return out;
}

// ---------------------------------------------------------------------
// Sp(2Nc) with 2Nf half-hypermultiplets
// ---------------------------------------------------------------------

inline FlavorVectorBCn map_sp_electric(const GaugeTheorySpec& g) {
    g.validate();
    if (g.group != GaugeGroup::Sp)
        throw config_error("map_sp_electric: spec is not an Sp theory");
    FlavorVectorBCn fv;
    fv.m = g.Nf - g.Nc - 2;
    fv.n = g.Nc;
    const cplx rw = g.quark_r_charge() * g.r_weight();
    for (int j = 0; j < 2 * g.Nf; ++j) {
        fv.t.push_back(g.t_bar[j] + rw);
        fv.a.push_back(g.a_bar[j]);
    }
    return fv;
}

inline FlavorVectorBCn map_sp_magnetic(const GaugeTheorySpec& g) {
    return bcn_transformed(map_sp_electric(g), g.modular());
}

inline ValueWithError sp_electric_index(const GaugeTheorySpec& g,
                                        const NumericsConfig& cfg = {}) {
    return bcn_sum_integral(map_sp_electric(g), g.modular(), cfg);
}

// Meson contribution of the magnetic symplectic theory: antisymmetric
// flavor pairs of the full list.
inline cplx sp_meson_product(const GaugeTheorySpec& g,
                             const NumericsConfig& cfg = {}) {
    return bcn_cross_product(map_sp_electric(g), g.modular(), cfg);
}

inline ValueWithError sp_magnetic_index(const GaugeTheorySpec& g,
                                        const NumericsConfig& cfg = {}) {
    ValueWithError out =
        bcn_sum_integral(map_sp_magnetic(g), g.modular(), cfg);
    out.value *= sp_meson_product(g, cfg);
    return out;
}

// ---------------------------------------------------------------------
// Duality check
// ---------------------------------------------------------------------

namespace detail {

inline nlohmann::json jspec(const GaugeTheorySpec& g) {
    nlohmann::json j{{"group", g.group == GaugeGroup::SU ? "su" : "sp"},
                     {"Nc", g.Nc},
                     {"Nf", g.Nf},
                     {"r", g.r},
                     {"sigma", jc(g.sigma)},
                     {"tau", jc(g.tau)},
                     {"t_bar", jcv(g.t_bar)},
                     {"a_bar", g.a_bar}};
    if (g.group == GaugeGroup::SU) {
        j["s_bar"] = jcv(g.s_bar);
        j["b_bar"] = g.b_bar;
        j["baryon"] = jc(g.baryon);
        j["n_B"] = g.n_B;
    }
    return j;
}

} // namespace detail

// Compare the electric and magnetic index of one physical spec.
inline VerificationReport check_seiberg_duality(const GaugeTheorySpec& g,
                                                const NumericsConfig& cfg = {},
                                                double tol = 1e-6) {
    g.validate();
    const bool su = g.group == GaugeGroup::SU;
    const char* name = su ? "seiberg_duality_su" : "seiberg_duality_sp";
    return detail::timed(name, 0, tol, [&](VerificationReport& rep) {
        ValueWithError e, m;
        double margin_e = 0.0, margin_m = 0.0;
        const ModularParams mp = g.modular();
        if (su) {
            margin_e = an_pole_margin(map_su_electric(g), mp);
            margin_m = an_pole_margin(map_su_magnetic(g), mp);
            e = su_electric_index(g, cfg);
            m = su_magnetic_index(g, cfg);
        } else {
            margin_e = bcn_pole_margin(map_sp_electric(g), mp);
            margin_m = bcn_pole_margin(map_sp_magnetic(g), mp);
            e = sp_electric_index(g, cfg);
            m = sp_magnetic_index(g, cfg);
        }
        rep.lhs = e.value;
        rep.rhs = m.value;
        rep.quad_err_lhs = e.est_rel_error;
        rep.quad_err_rhs = m.est_rel_error;
        rep.params = {{"spec", detail::jspec(g)},
                      {"electric_margin", margin_e},
                      {"magnetic_margin", margin_m},
                      {"electric_nodes", e.nodes_used},
                      {"magnetic_nodes", m.nodes_used},
                      {"electric_converged", e.converged},
                      {"magnetic_converged", m.converged}};
    });
}

// Seeded spec with generic small fugacities: traceless bands around the
// R-charge heights, holonomies with a canonical absorber, default baryon
// data. Every draw clears the contour bands of both dual descriptions.
inline GaugeTheorySpec sample_gauge_spec(GaugeGroup group, int Nc, int Nf,
                                         int r, std::uint64_t seed) {
    Rng rng(seed);
    GaugeTheorySpec g;
    g.group = group;
    g.Nc = Nc;
    g.Nf = Nf;
    g.r = r;
    const ModularParams mp = detail::draw_modular_params(rng, r);
    g.sigma = mp.sigma;
    g.tau = mp.tau;
    const double band = 0.05 * mp.strip_height();
    const int F = group == GaugeGroup::SU ? Nf : 2 * Nf;
    auto draw_traceless = [&](std::vector<cplx>& out) {
        cplx sum{0.0, 0.0};
        for (int j = 0; j + 1 < F; ++j) {
            const cplx v{rng.uniform(-0.1, 0.1), rng.uniform(-band, band)};
            out.push_back(v);
            sum += v;
        }
        out.push_back(-sum);
    };
    auto draw_holonomies = [&](std::vector<int>& out) {
        int sum = 0;
        for (int j = 0; j + 1 < F; ++j) {
            out.push_back(rng.below(r));
            sum += out.back();
        }
        out.push_back(canonical_mod(-sum, r));
    };
    draw_traceless(g.t_bar);
    draw_holonomies(g.a_bar);
    if (group == GaugeGroup::SU) {
        draw_traceless(g.s_bar);
        draw_holonomies(g.b_bar);
        g.baryon = cplx{0.0, 0.01};
        g.n_B = 0;
    } else {
        g.baryon = cplx{0.0, 0.0};
        g.n_B = 0;
    }
    g.validate();
    return g;
}

// Seeded duality run, the form surfaced by the command line.
inline VerificationReport verify_seiberg_duality(GaugeGroup group, int Nc,
                                                 int Nf, int r,
                                                 std::uint64_t seed,
                                                 const NumericsConfig& cfg = {},
                                                 double tol = 1e-6) {
    const GaugeTheorySpec g = sample_gauge_spec(group, Nc, Nf, r, seed);
    VerificationReport rep = check_seiberg_duality(g, cfg, tol);
    rep.seed = seed;
    rep.params["seed"] = seed;
    return rep;
}

} // namespace lensehg

#endif // LENSEHG_SUSY_HPP

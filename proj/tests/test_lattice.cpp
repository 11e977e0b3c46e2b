#include <catch2/catch_amalgamated.hpp>

#include "lensehg/lattice.hpp"

#include "oracle.hpp"

using namespace lensehg;

namespace {

const NumericsConfig cfg{};
const ModularParams golden_mp{cplx{0.11, 0.23}, cplx{0.05, 0.31}, 2};

double rel(cplx got, cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

cplx oracle_phi(cplx z, int m, const ModularParams& mp) {
    const cplx ieta = 0.5 * (mp.sigma + mp.tau);
    return oracle::to_double(
        oracle::lens_gamma(oracle::from(ieta - z), -m, oracle::from(mp.sigma),
                           oracle::from(mp.tau), mp.r));
}

Spin pinned_spin() {
    Spin s;
    s.x = {0.0};
    s.m = {0};
    return s;
}

} // namespace

TEST_CASE("reflected kernel inverts under negation", "[lattice]") {
    for (int r : {1, 2}) {
        const ModularParams mp{golden_mp.sigma, golden_mp.tau, r};
        const cplx z{0.17, 0.08};
        for (int m = 0; m < r; ++m) {
            const cplx prod = phi_fn({z, m}, mp, cfg) *
                              phi_fn({-z, -m}, mp, cfg);
            INFO("r=" << r << " m=" << m);
            REQUIRE(rel(prod, cplx{1.0, 0.0}) < 1e-13);
        }
    }
}

TEST_CASE("reflected kernel substitution recovers the gamma function",
          "[lattice]") {
    const cplx ieta = 0.5 * (golden_mp.sigma + golden_mp.tau);
    const cplx w{0.21, 0.17};
    const cplx got = phi_fn({ieta - w, -1}, golden_mp, cfg);
    const cplx want = lens_gamma({w, 1}, golden_mp, cfg);
    REQUIRE(rel(got, want) < 1e-13);
}

TEST_CASE("reflected kernel extended-precision value", "[lattice]") {
    const cplx got = phi_fn({cplx{0.2, 0.0}, 1}, golden_mp, cfg);
    const cplx want = oracle_phi(cplx{0.2, 0.0}, 1, golden_mp);
    REQUIRE(rel(got, want) < 1e-12);
}

TEST_CASE("edge weight ordering matters", "[lattice]") {
    // Two-component spins under the sum constraints have a negation-closed
    // pair multiset, which makes the weight symmetric there; the ordering
    // becomes visible from three components on.
    Spin a2, b2;
    a2.x = {0.23, -0.23};
    a2.m = {1, 1};
    b2.x = {0.41, -0.41};
    b2.m = {0, 0};
    const cplx alpha{0.0, 0.1};
    REQUIRE(rel(w_weight(alpha, a2, b2, golden_mp, cfg),
                w_weight(alpha, b2, a2, golden_mp, cfg)) < 1e-12);

    Spin a, b;
    a.x = {0.1, 0.25, -0.35};
    a.m = {1, 1, 0};
    b.x = {0.4, -0.15, -0.25};
    b.m = {0, 0, 0};
    a.validate(2);
    b.validate(2);
    const cplx ab = w_weight(alpha, a, b, golden_mp, cfg);
    const cplx ba = w_weight(alpha, b, a, golden_mp, cfg);
    REQUIRE(rel(ab, ba) > 1e-3);
}

TEST_CASE("edge weight matches the direct kernel product", "[lattice]") {
    Spin a, b;
    a.x = {0.23, -0.23};
    a.m = {1, 1};
    b.x = {0.41, -0.41};
    b.m = {0, 1};

    const cplx alpha{0.0, 0.1};
    const cplx ia = cplx{0.0, 1.0} * alpha;
    cplx want{1.0, 0.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            want *= oracle_phi(a.x[i] - b.x[j] + ia, a.m[i] - b.m[j],
                               golden_mp);
    const cplx got = w_weight(alpha, a, b, golden_mp, cfg);
    REQUIRE(rel(got, want) < 5e-12);
}

TEST_CASE("single-component self-weight is the empty product", "[lattice]") {
    REQUIRE(self_weight(pinned_spin(), golden_mp, cfg) == cplx{1.0, 0.0});
}

TEST_CASE("self-weight is the reciprocal pair product", "[lattice]") {
    Spin a;
    a.x = {0.23, 0.17, -0.4};
    a.m = {1, 0, 1};
    a.validate(2);
    cplx den{1.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double dx = a.x[i] - a.x[j];
            const int dm = a.m[i] - a.m[j];
            den *= lens_gamma({dx, dm}, golden_mp, cfg);
            den *= lens_gamma({-dx, -dm}, golden_mp, cfg);
        }
    const cplx got = self_weight(a, golden_mp, cfg);
    REQUIRE(rel(got, 1.0 / den) < 1e-12);
}

TEST_CASE("crossed weight keeps one branch per spin", "[lattice]") {
    LatticeParams lp;
    lp.modular = golden_mp;
    lp.n = 2;
    lp.u = cplx{0.1, 0.01};
    lp.v = cplx{0.0, -0.01};
    Spin a, b;
    a.x = {0.23, -0.23};
    a.m = {1, 1};
    b.x = {0.37, -0.37};
    b.m = {0, 0};

    const cplx alpha = lp.u - lp.v;
    const cplx root = std::sqrt(self_weight(a, golden_mp, cfg)) *
                      std::sqrt(self_weight(b, golden_mp, cfg));
    const cplx ratio = wbar_weight(alpha, a, b, lp, cfg) /
                       w_weight(lp.eta() - alpha, a, b, golden_mp, cfg);
    REQUIRE(rel(ratio, root) < 1e-12);

    // At the self-crossing point the plain weight carries half the
    // crossing parameter.
    const cplx half = 0.5 * lp.eta();
    const cplx got = wbar_weight(half, a, b, lp, cfg);
    const cplx want = root * w_weight(half, a, b, golden_mp, cfg);
    REQUIRE(rel(got, want) < 1e-12);
}

TEST_CASE("spin measure normalization", "[lattice]") {
    for (int r : {1, 2, 3}) {
        const ValueWithError got =
            spin_integrate([](const Spin&) { return cplx{1.0, 0.0}; }, 2, r,
                           cfg);
        REQUIRE(got.converged);
        INFO("r=" << r);
        REQUIRE(rel(got.value, cplx{static_cast<double>(r), 0.0}) < 1e-12);
    }
    const ValueWithError three =
        spin_integrate([](const Spin&) { return cplx{1.0, 0.0}; }, 3, 2, cfg);
    REQUIRE(rel(three.value, cplx{4.0, 0.0}) < 1e-12);
}

TEST_CASE("one-component measure evaluates at the pinned spin", "[lattice]") {
    const ValueWithError got = spin_integrate(
        [](const Spin& s) {
            REQUIRE(s.size() == 1);
            REQUIRE(s.x[0] == 0.0);
            REQUIRE(s.m[0] == 0);
            return cplx{0.25, -0.5};
        },
        1, 3, cfg);
    REQUIRE(got.value == cplx{0.25, -0.5});
    REQUIRE(got.nodes_used == 0);
}

TEST_CASE("spin measure is linear", "[lattice]") {
    auto f = [](const Spin& s) {
        return cplx{1.0, 0.0} +
               0.3 * std::exp(twopii * s.x[0]) * static_cast<double>(s.m[0] + 1);
    };
    auto g = [](const Spin& s) {
        return std::cos(2.0 * pi * s.x[0]) + cplx{0.0, 0.5} *
                                                 static_cast<double>(s.m[1]);
    };
    auto combo = [&](const Spin& s) { return 2.0 * f(s) + 3.0 * g(s); };
    const cplx lhs = spin_integrate(combo, 2, 2, cfg).value;
    const cplx rhs = 2.0 * spin_integrate(f, 2, 2, cfg).value +
                     3.0 * spin_integrate(g, 2, 2, cfg).value;
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("one-component star weight is a product of four edges",
          "[lattice]") {
    LatticeParams lp;
    lp.modular = ModularParams{golden_mp.sigma, golden_mp.tau, 1};
    lp.n = 1;
    const double H = lp.modular.strip_height();
    lp.u = cplx{0.15 * H, 0.01};
    lp.v = cplx{0.0, -0.012};
    lp.up = cplx{0.18 * H, 0.007};
    lp.vp = cplx{-0.02 * H, 0.003};

    const Spin p = pinned_spin();
    const ValueWithError got = irf_weight(1, p, p, p, p, lp, cfg);
    REQUIRE(got.nodes_used == 0);
    const cplx want = wbar_weight(lp.u - lp.v, p, p, lp, cfg) *
                      wbar_weight(lp.up - lp.vp, p, p, lp, cfg) *
                      w_weight(lp.up - lp.v, p, p, lp.modular, cfg) *
                      w_weight(lp.u - lp.vp, p, p, lp.modular, cfg);
    REQUIRE(rel(got.value, want) < 1e-13);
}

TEST_CASE("the two star kinds differ", "[lattice]") {
    Rng rng(91);
    LatticeParams lp;
    lp.modular = ModularParams{golden_mp.sigma, golden_mp.tau, 1};
    lp.n = 2;
    const double H = lp.modular.strip_height();
    lp.u = cplx{0.15 * H, 0.01};
    lp.v = cplx{0.0, -0.012};
    lp.up = cplx{0.18 * H, 0.007};
    lp.vp = cplx{-0.02 * H, 0.003};
    const Spin si = detail::sample_spin(rng, 2, 1);
    const Spin sj = detail::sample_spin(rng, 2, 1);
    const Spin sk = detail::sample_spin(rng, 2, 1);
    const Spin sl = detail::sample_spin(rng, 2, 1);
    const cplx w1 = irf_weight(1, si, sj, sk, sl, lp, cfg).value;
    const cplx w2 = irf_weight(2, si, sj, sk, sl, lp, cfg).value;
    REQUIRE(rel(w1, w2) > 1e-3);
}

TEST_CASE("two-component star weight against the midpoint oracle",
          "[lattice]") {
    Rng rng(17);
    LatticeParams lp;
    lp.modular = golden_mp;
    lp.n = 2;
    const double H = golden_mp.strip_height();
    lp.u = cplx{0.15 * H, 0.013};
    lp.v = cplx{0.0, -0.008};
    lp.up = cplx{0.18 * H, 0.004};
    lp.vp = cplx{-0.02 * H, -0.006};
    const Spin si = detail::sample_spin(rng, 2, 2);
    const Spin sj = detail::sample_spin(rng, 2, 2);
    const Spin sk = detail::sample_spin(rng, 2, 2);
    const Spin sl = detail::sample_spin(rng, 2, 2);

    const ValueWithError got = irf_weight(1, si, sj, sk, sl, lp, cfg);
    REQUIRE(got.converged);

    const cplx eta = lp.eta();
    auto f = [&](const std::vector<cplx>& zf) {
        Spin h;
        h.x = {zf[0].real(), -zf[0].real()};
        h.m = {0, 0};
        cplx acc{0.0, 0.0};
        for (int m0 = 0; m0 < 2; ++m0) {
            h.m = {m0, canonical_mod(-m0, 2)};
            bool hit = false;
            const cplx sh =
                detail::guarded_self_weight(h, golden_mp, cfg, hit);
            if (hit) continue;
            acc += sh *
                   w_weight(eta - (lp.u - lp.v), sk, h, golden_mp, cfg) *
                   w_weight(eta - (lp.up - lp.vp), sj, h, golden_mp, cfg) *
                   w_weight(lp.up - lp.v, h, si, golden_mp, cfg) *
                   w_weight(lp.u - lp.vp, h, sl, golden_mp, cfg);
        }
        return acc;
    };
    cplx want = oracle::integrate_midpoint(f, 1, {0.0}, 256);
    want *= std::sqrt(self_weight(sj, golden_mp, cfg)) *
            std::sqrt(self_weight(sk, golden_mp, cfg));
    REQUIRE(rel(got.value, want) < 1e-7);
}

TEST_CASE("one-component star-star relation", "[lattice]") {
    for (int r : {1, 2}) {
        const VerificationReport rep = verify_star_star(1, r, 101 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
        REQUIRE(rep.rel_err <= 1e-12);
        REQUIRE(rep.params["map_consistency_abs"].get<double>() <= 1e-13);
        REQUIRE(rep.params["map_labels_consistent"].get<bool>());
        REQUIRE(rep.params["prefactor_ratio_rel"].get<double>() <= 1e-12);
        REQUIRE(rep.params["w1_route_rel"].get<double>() <= 1e-12);
        REQUIRE(rep.params["w2_route_rel"].get<double>() <= 1e-12);
    }
}

TEST_CASE("two-component star-star relation", "[lattice]") {
    for (int r : {1, 2}) {
        const VerificationReport rep = verify_star_star(2, r, 103 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err
                  << " w1_route=" << rep.params["w1_route_rel"]
                  << " w2_route=" << rep.params["w2_route_rel"]);
        REQUIRE(rep.pass);
        REQUIRE(rep.rel_err <= 1e-5);
        REQUIRE(rep.params["map_consistency_abs"].get<double>() <= 1e-13);
        REQUIRE(rep.params["map_labels_consistent"].get<bool>());
        REQUIRE(rep.params["prefactor_ratio_rel"].get<double>() <= 1e-12);
        REQUIRE(rep.params["w1_route_rel"].get<double>() <= 1e-8);
        REQUIRE(rep.params["w2_route_rel"].get<double>() <= 1e-8);
    }
}

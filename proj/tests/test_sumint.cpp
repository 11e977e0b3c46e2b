#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numeric>

#include "lensehg/identities.hpp"
#include "lensehg/sumint.hpp"
#include "oracle.hpp"

using namespace lensehg;

namespace {

double rel(cplx got, cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

const NumericsConfig cfg{};
const ModularParams mp2{{0.11, 0.23}, {0.05, 0.31}, 2};

// Extended-precision evaluation of the A-type integrand at one point.
cplx oracle_an_integrand(const std::vector<cplx>& zs, const std::vector<int>& ys,
                         const FlavorVectorAn& fv, const ModularParams& mp) {
    const auto g = [&](cplx z, int m) {
        return oracle::lens_gamma(oracle::from(z), m, oracle::from(mp.sigma),
                                  oracle::from(mp.tau), mp.r);
    };
    oracle::lcplx num{1.0L, 0.0L};
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (int j = 0; j < fv.flavors(); ++j) {
            num *= g(fv.t[j] + zs[i], fv.a[j] + ys[i]);
            num *= g(fv.s[j] - zs[i], fv.b[j] - ys[i]);
        }
    oracle::lcplx den{1.0L, 0.0L};
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (std::size_t j = i + 1; j < zs.size(); ++j) {
            den *= g(zs[i] - zs[j], ys[i] - ys[j]);
            den *= g(zs[j] - zs[i], ys[j] - ys[i]);
        }
    return oracle::to_double(num / den);
}

} // namespace

TEST_CASE("label tuple enumeration is lexicographic and complete",
          "[sumint]") {
    const auto tup = enumerate_tuples(2, 3);
    REQUIRE(tup.size() == 9);
    REQUIRE(tup.front() == std::vector<int>{0, 0});
    REQUIRE(tup[1] == std::vector<int>{0, 1});
    REQUIRE(tup[3] == std::vector<int>{1, 0});
    REQUIRE(tup.back() == std::vector<int>{2, 2});

    const auto con = enumerate_tuples_sum(3, 3, 2);
    REQUIRE(con.size() == 9); // two free slots
    for (const auto& t : con) {
        REQUIRE(t.size() == 3);
        const int s = std::accumulate(t.begin(), t.end(), 0);
        REQUIRE(canonical_mod(s - 2, 3) == 0);
        for (int v : t) {
            REQUIRE(v >= 0);
            REQUIRE(v < 3);
        }
    }

    REQUIRE(enumerate_tuples(0, 5) == std::vector<std::vector<int>>{{}});
    REQUIRE(enumerate_tuples(2, 1) ==
            std::vector<std::vector<int>>{{0, 0}});
}

TEST_CASE("field validation rejects malformed configurations", "[sumint]") {
    FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 11, cfg);
    REQUIRE_NOTHROW(fv.validate(mp2));

    FlavorVectorAn bad = fv;
    bad.t.pop_back();
    REQUIRE_THROWS_AS(bad.validate(mp2), config_error);

    bad = fv;
    bad.t[0] += 0.01; // breaks balancing
    REQUIRE_THROWS_AS(bad.validate(mp2), config_error);

    bad = fv;
    bad.a[0] += 1; // breaks label balancing
    REQUIRE_THROWS_AS(bad.validate(mp2), config_error);

    // Real parts may move by the double period without harm.
    FlavorVectorAn moved = fv;
    moved.t[0] += 2.0 * mp2.r;
    REQUIRE_NOTHROW(moved.validate(mp2));
}

TEST_CASE("sampled configurations satisfy the design constraints",
          "[sumint]") {
    for (int r = 1; r <= 3; ++r) {
        const FlavorVectorAn fv =
            sample_an(1, 1, r, mp2.sigma, mp2.tau, 99 + r, cfg);
        ModularParams mp = mp2;
        mp.r = r;
        REQUIRE_NOTHROW(fv.validate(mp));
        REQUIRE(fv.Z == cplx{0.0, 0.0});
        REQUIRE(fv.Y == 0);
        REQUIRE(an_pole_margin(fv, mp) > cfg.pole_guard);
        REQUIRE(an_pole_margin(an_transformed(fv, mp), mp) > cfg.pole_guard);

        const FlavorVectorBCn bc =
            sample_bcn(1, 1, r, mp2.sigma, mp2.tau, 7 + r, cfg);
        REQUIRE_NOTHROW(bc.validate(mp));
        REQUIRE(bcn_pole_margin(bc, mp) > cfg.pole_guard);
        REQUIRE(bcn_pole_margin(bcn_transformed(bc, mp), mp) > cfg.pole_guard);
    }
}

TEST_CASE("zero-variable families evaluate to closed products", "[sumint]") {
    FlavorVectorAn fv;
    fv.m = 0;
    fv.n = 0;
    fv.t = {cplx{0.05, 0.11}, cplx{-0.08, 0.14}};
    fv.s = {cplx{0.10, 0.13}, cplx{0.0, 0.0}};
    fv.s[1] = (mp2.sigma + mp2.tau) - fv.t[0] - fv.t[1] - fv.s[0];
    fv.a = {1, 0};
    fv.b = {1, 0};
    fv.Z = cplx{0.02, 0.01};
    fv.Y = 1;
    const ValueWithError got = an_sum_integral(fv, mp2, cfg);
    REQUIRE(got.converged);
    cplx want{1.0, 0.0};
    for (int j = 0; j < 2; ++j) {
        want *= lens_gamma({fv.t[j] + fv.Z, fv.a[j] + fv.Y}, mp2, cfg);
        want *= lens_gamma({fv.s[j] - fv.Z, fv.b[j] - fv.Y}, mp2, cfg);
    }
    REQUIRE(rel(got.value, want) < 1e-14);

    FlavorVectorBCn bc;
    bc.m = 1;
    bc.n = 0;
    bc.t = {cplx{0.05, 0.2}, cplx{-0.03, 0.22}, cplx{0.07, 0.19},
            cplx{0.0, 0.0}, cplx{0.01, 0.23}, cplx{-0.02, 0.12}};
    bc.t[3] = 2.0 * (mp2.sigma + mp2.tau) - bc.t[0] - bc.t[1] - bc.t[2] -
              bc.t[4] - bc.t[5];
    bc.a = {1, 1, 0, 0, 1, 1};
    REQUIRE(bcn_sum_integral(bc, mp2, cfg).value == cplx{1.0, 0.0});
}

TEST_CASE("A-type integrand matches the extended-precision assembly",
          "[sumint]") {
    const FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 42, cfg);
    const std::vector<cplx> zs{cplx{0.37, 0.0}, cplx{-0.37, 0.0}};
    for (int y0 = 0; y0 < 2; ++y0) {
        const std::vector<int> ys{y0, canonical_mod(-y0, 2)};
        const cplx got = an_integrand(zs, ys, fv, mp2, cfg);
        const cplx want = oracle_an_integrand(zs, ys, fv, mp2);
        REQUIRE(rel(got, want) < 1e-11);
    }
}

TEST_CASE("A-type sum/integral agrees with the midpoint oracle", "[sumint]") {
    const FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 42, cfg);
    const ValueWithError got = an_sum_integral(fv, mp2, cfg);
    REQUIRE(got.converged);

    const auto tuples = enumerate_tuples_sum(2, 2, 0);
    auto f = [&](const std::vector<cplx>& zfree) {
        const std::vector<cplx> zs{zfree[0], -zfree[0]};
        cplx acc{0.0, 0.0};
        for (const auto& ys : tuples) acc += an_integrand(zs, ys, fv, mp2, cfg);
        return acc;
    };
    const cplx lam = lambda_const(mp2, cfg);
    const cplx want =
        lam / 2.0 * oracle::integrate_midpoint(f, 1, {0.0}, 384);
    REQUIRE(rel(got.value, want) < 1e-9);
}

TEST_CASE("BC-type sum/integral agrees with the midpoint oracle", "[sumint]") {
    const FlavorVectorBCn fv = sample_bcn(0, 1, 2, mp2.sigma, mp2.tau, 7, cfg);
    const ValueWithError got = bcn_sum_integral(fv, mp2, cfg);
    REQUIRE(got.converged);

    auto f = [&](const std::vector<cplx>& z) {
        cplx acc{0.0, 0.0};
        for (int y = 0; y < 2; ++y) acc += bcn_integrand(z, {y}, fv, mp2, cfg);
        return acc;
    };
    const cplx lam = lambda_const(mp2, cfg);
    const cplx want = lam / 2.0 * oracle::integrate_midpoint(f, 1, {0.0}, 384);
    REQUIRE(rel(got.value, want) < 1e-9);
}

TEST_CASE("one-variable BC-type integrand equals its A-type split",
          "[sumint]") {
    const FlavorVectorBCn fv = sample_bcn(1, 1, 2, mp2.sigma, mp2.tau, 5, cfg);
    const FlavorVectorAn as = bcn1_as_an(fv);
    REQUIRE_NOTHROW(as.validate(mp2));
    for (double zre : {0.21, 0.43, 0.77}) {
        for (int y = 0; y < 2; ++y) {
            const cplx bc =
                bcn_integrand({cplx{zre, 0.0}}, {y}, fv, mp2, cfg);
            const cplx an = an_integrand({cplx{zre, 0.0}, cplx{-zre, 0.0}},
                                         {y, canonical_mod(-y, 2)}, as, mp2,
                                         cfg);
            REQUIRE(rel(bc, an) < 1e-12);
        }
    }
}

TEST_CASE("integrand vanishes where integration variables collide",
          "[sumint]") {
    const FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 42, cfg);
    // z and -z collide at the half-period points when the labels agree.
    const cplx val =
        an_integrand({cplx{0.5, 0.0}, cplx{-0.5, 0.0}}, {0, 0}, fv, mp2, cfg);
    REQUIRE(val == cplx{0.0, 0.0});
    const FlavorVectorBCn bc = sample_bcn(0, 1, 2, mp2.sigma, mp2.tau, 7, cfg);
    REQUIRE(bcn_integrand({cplx{0.0, 0.0}}, {0}, bc, mp2, cfg) ==
            cplx{0.0, 0.0});
}

TEST_CASE("infeasible contours are rejected before integration", "[sumint]") {
    FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 42, cfg);
    // Push one height onto the contour: the margin collapses.
    const double shift = fv.t[0].imag() - cfg.pole_guard / 4.0;
    fv.t[0] -= cplx{0.0, shift};
    fv.s[0] += cplx{0.0, shift};
    REQUIRE_THROWS_AS(an_sum_integral(fv, mp2, cfg), contour_error);

    FlavorVectorBCn bc = sample_bcn(0, 1, 2, mp2.sigma, mp2.tau, 7, cfg);
    const double sh2 = bc.t[0].imag() - cfg.pole_guard / 4.0;
    bc.t[0] -= cplx{0.0, sh2};
    bc.t[1] += cplx{0.0, sh2};
    REQUIRE_THROWS_AS(bcn_sum_integral(bc, mp2, cfg), contour_error);
}

TEST_CASE("shift and swap reparametrisations preserve the value",
          "[sumint]") {
    const FlavorVectorAn fv = sample_an(0, 1, 2, mp2.sigma, mp2.tau, 13, cfg);
    const ValueWithError base = an_sum_integral(fv, mp2, cfg);

    const cplx c{0.07, -0.01};
    const FlavorVectorAn sh = an_shifted(fv, c, 3);
    REQUIRE_NOTHROW(sh.validate(mp2));
    const ValueWithError moved = an_sum_integral(sh, mp2, cfg);
    REQUIRE(rel(moved.value, base.value) < 1e-9);

    const ValueWithError swapped = an_sum_integral(an_swapped(fv), mp2, cfg);
    REQUIRE(rel(swapped.value, base.value) < 1e-9);
}

TEST_CASE("pole margins report vertical distances", "[sumint]") {
    FlavorVectorAn fv;
    fv.m = 0;
    fv.n = 0;
    const double H = mp2.strip_height();
    fv.t = {cplx{0.0, 0.1}, cplx{0.0, 0.2}};
    fv.s = {cplx{0.0, 0.15}, cplx{0.0, 0.0}};
    fv.s[1] = (mp2.sigma + mp2.tau) - fv.t[0] - fv.t[1] - fv.s[0];
    fv.a = {0, 0};
    fv.b = {0, 0};
    const double margin = an_pole_margin(fv, mp2);
    const double h_last = fv.s[1].imag();
    const double want = std::min({0.1, 0.15, h_last, H - 0.2, H - h_last});
    REQUIRE(margin == Catch::Approx(want).margin(1e-14));
}

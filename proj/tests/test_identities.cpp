#include <catch2/catch_amalgamated.hpp>

#include "lensehg/identities.hpp"

using namespace lensehg;

namespace {
const NumericsConfig cfg{};
}

TEST_CASE("kernel identity sweep stays at rounding level", "[identities]") {
    for (int r = 1; r <= 3; ++r) {
        const VerificationReport rep = verify_kernel_suite(r, 40, 20 + r, cfg);
        INFO("r=" << r << " worst=" << rep.lhs.real());
        REQUIRE(rep.pass);
        REQUIRE(rep.lhs.real() <= 1e-10);
    }
}

TEST_CASE("leading pole residue verifier", "[identities]") {
    for (int r = 1; r <= 3; ++r) {
        const VerificationReport rep = verify_residue(r, 31 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("six-flavor one-variable evaluation", "[identities]") {
    for (int r = 1; r <= 2; ++r) {
        const VerificationReport rep = verify_elliptic_beta(r, 40 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err
                  << " sym=" << rep.params["integrand_symmetry_error"]
                  << " fold=" << rep.params["folded_sum_error"]);
        REQUIRE(rep.pass);
        REQUIRE(rep.rel_err <= 1e-8);
        REQUIRE(rep.params["integrand_symmetry_error"].get<double>() <= 1e-12);
        REQUIRE(rep.params["folded_sum_error"].get<double>() <= 1e-12);
    }
}

TEST_CASE("A-type evaluation identity, one variable", "[identities]") {
    for (int r = 1; r <= 2; ++r) {
        const VerificationReport rep = verify_an_evaluation(1, r, 50 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
        REQUIRE(rep.rel_err <= 1e-8);
    }
}

TEST_CASE("A-type transform identity across variable counts",
          "[identities]") {
    const std::pair<int, int> shapes[] = {{0, 0}, {0, 1}, {1, 0}};
    for (const auto& [m, n] : shapes) {
        const VerificationReport rep =
            verify_an_transform(m, n, 2, 60 + 10 * m + n, cfg);
        INFO("(m,n)=(" << m << "," << n << ") rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("A-type transform involution", "[identities]") {
    const VerificationReport rep = verify_an_involution(1, 1, 2, 71, cfg);
    INFO("rel_err=" << rep.rel_err
                    << " drift=" << rep.params["field_round_trip_drift"]);
    REQUIRE(rep.pass);
    REQUIRE(rep.params["field_round_trip_drift"].get<double>() <= 1e-12);
}

TEST_CASE("A-type covariance verifier", "[identities]") {
    const VerificationReport rep = verify_an_covariance(0, 1, 2, 81, cfg);
    INFO("rel_err=" << rep.rel_err);
    REQUIRE(rep.pass);
}

TEST_CASE("BC-type evaluation identity, one variable", "[identities]") {
    for (int r = 1; r <= 2; ++r) {
        const VerificationReport rep = verify_bcn_evaluation(1, r, 90 + r, cfg);
        INFO("r=" << r << " rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
        REQUIRE(rep.rel_err <= 1e-8);
    }
}

TEST_CASE("BC-type transform identity", "[identities]") {
    const std::pair<int, int> shapes[] = {{0, 0}, {0, 1}};
    for (const auto& [m, n] : shapes) {
        const VerificationReport rep =
            verify_bcn_transform(m, n, 2, 100 + 10 * m + n, cfg);
        INFO("(m,n)=(" << m << "," << n << ") rel_err=" << rep.rel_err);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("BC-type one-variable reduction to the A-type family",
          "[identities]") {
    const VerificationReport rep = verify_bcn1_reduction(0, 2, 111, cfg);
    INFO("rel_err=" << rep.rel_err);
    REQUIRE(rep.pass);
    REQUIRE(rep.rel_err <= 1e-10);
}

TEST_CASE("determinant identities at small rank", "[identities]") {
    for (int k = 1; k <= 2; ++k)
        for (int n = 2; n <= 3; ++n) {
            const VerificationReport f =
                verify_frobenius_det(n, 2, k, 120 + 10 * k + n, cfg);
            INFO("frobenius n=" << n << " k=" << k
                                << " rel_err=" << f.rel_err);
            REQUIRE(f.pass);
            const VerificationReport c =
                verify_cauchy_det(n, 2, k, 140 + 10 * k + n, cfg);
            INFO("cauchy n=" << n << " k=" << k << " rel_err=" << c.rel_err);
            REQUIRE(c.pass);
        }
}

TEST_CASE("degeneration limits improve as the detuning shrinks",
          "[identities]") {
    const VerificationReport a1 = verify_an_limit(0, 1, 160, 1e-2, cfg);
    const VerificationReport a2 = verify_an_limit(0, 1, 160, 1e-3, cfg);
    INFO("A: err(1e-2)=" << a1.rel_err << " err(1e-3)=" << a2.rel_err);
    REQUIRE(a2.rel_err < a1.rel_err);
    REQUIRE(a2.rel_err <= 5e-3);

    const VerificationReport b1 = verify_bcn_limit(0, 1, 161, 1e-2, cfg);
    const VerificationReport b2 = verify_bcn_limit(0, 1, 161, 1e-3, cfg);
    INFO("BC: err(1e-2)=" << b1.rel_err << " err(1e-3)=" << b2.rel_err);
    REQUIRE(b2.rel_err < b1.rel_err);
    REQUIRE(b2.rel_err <= 5e-3);
}

TEST_CASE("reports are reproducible for identical seeds", "[identities]") {
    const VerificationReport r1 = verify_an_transform(0, 1, 2, 170, cfg);
    const VerificationReport r2 = verify_an_transform(0, 1, 2, 170, cfg);
    REQUIRE(r1.lhs == r2.lhs);
    REQUIRE(r1.rhs == r2.rhs);
    REQUIRE(r1.params == r2.params);
    const VerificationReport r3 = verify_an_transform(0, 1, 2, 171, cfg);
    REQUIRE(r3.lhs != r1.lhs);
}

TEST_CASE("sampler retry budget surfaces as a typed error", "[identities]") {
    // With a guard wider than any margin the strip can offer, every attempt
    // must be rejected and the retry budget has to surface as a typed error.
    NumericsConfig wide = cfg;
    wide.pole_guard = 0.45;
    REQUIRE_THROWS_AS(sample_an(0, 1, 1, cplx{0.11, 0.23}, cplx{0.05, 0.31}, 1, wide),
                      sampler_error);
}

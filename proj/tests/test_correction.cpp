#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ptdiff/admissibility.hpp"
#include "ptdiff/correction.hpp"
#include "oracles.hpp"

using namespace ptdiff;
using cd = std::complex<double>;

TEST_CASE("signed_power basics") {
    CHECK(signed_power(-4.0, 0.5) == doctest::Approx(-2.0));
    CHECK(signed_power(3.0, 0.0) == 1.0);
    CHECK(signed_power(-2.0, 2.0) == doctest::Approx(-4.0));
    CHECK(signed_power(0.0, 0.0) == 0.0);
    CHECK(signed_power(0.0, 0.7) == 0.0);
    CHECK(signed_power(-0.5, 0.0) == -1.0);
}

TEST_CASE("linear gains from roots") {
    SUBCASE("single root at -1") {
        std::vector<cd> r{{-1.0, 0.0}};
        auto g = linear_gains_from_roots(r);
        REQUIRE(g.size() == 1);
        CHECK(g[0] == doctest::Approx(1.0));
    }
    SUBCASE("double root at -2") {
        std::vector<cd> r{{-2.0, 0.0}, {-2.0, 0.0}};
        auto g = linear_gains_from_roots(r);
        REQUIRE(g.size() == 2);
        CHECK(g[0] == doctest::Approx(4.0));
        CHECK(g[1] == doctest::Approx(4.0));
    }
    SUBCASE("triple root at -3") {
        std::vector<cd> r{{-3.0, 0.0}, {-3.0, 0.0}, {-3.0, 0.0}};
        auto g = linear_gains_from_roots(r);
        REQUIRE(g.size() == 3);
        CHECK(g[0] == doctest::Approx(9.0));
        CHECK(g[1] == doctest::Approx(27.0));
        CHECK(g[2] == doctest::Approx(27.0));
    }
    SUBCASE("matches the real-arithmetic oracle for random real root sets") {
        for (int n = 0; n <= 4; ++n) {
            std::vector<double> roots(n + 1);
            std::vector<cd> croots(n + 1);
            for (int i = 0; i <= n; ++i) {
                roots[i] = -(n + 1.0) - 0.37 * i;  // max real part at -(n+1)
                croots[i] = {roots[i], 0.0};
            }
            auto expect = oracles::real_poly_from_roots(roots);
            auto got = linear_gains_from_roots(croots);
            REQUIRE(got.size() == expect.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
        }
    }
    SUBCASE("conjugate pair expands to real coefficients") {
        std::vector<cd> r{{-2.0, 1.5}, {-2.0, -1.5}};
        auto g = linear_gains_from_roots(r);
        CHECK(g[0] == doctest::Approx(4.0));          // sum of -roots
        CHECK(g[1] == doctest::Approx(4.0 + 2.25));   // |root|^2
    }
    SUBCASE("rejects bad sets") {
        std::vector<cd> pos{{1.0, 0.0}};
        CHECK_THROWS_AS((void)linear_gains_from_roots(pos), std::invalid_argument);
        std::vector<cd> wrong_max{{-3.0, 0.0}};  // max real part must be -1 for n=0
        CHECK_THROWS_AS((void)linear_gains_from_roots(wrong_max), std::invalid_argument);
        std::vector<cd> unpaired{{-2.0, 1.0}, {-2.0, 0.0}};
        CHECK_THROWS_AS((void)linear_gains_from_roots(unpaired), std::invalid_argument);
    }
}

TEST_CASE("menard settling bound") {
    CHECK(menard_settling_bound(1.0, 0.9, 1.1) == doctest::Approx(80.0));
    CHECK(menard_settling_bound(2.0, 0.9, 1.1) == doctest::Approx(40.0));
    CHECK_THROWS_AS((void)menard_settling_bound(0.5, 0.9, 1.1), std::invalid_argument);
    CHECK_THROWS_AS((void)menard_settling_bound(1.0, 1.0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS((void)menard_settling_bound(1.0, 0.9, 1.0), std::invalid_argument);

    SUBCASE("decreasing in theta, increasing as c or b approach 1") {
        double prev = menard_settling_bound(1.0, 0.9, 1.1);
        for (double theta : {1.5, 2.0, 3.0}) {
            const double v = menard_settling_bound(theta, 0.9, 1.1);
            CHECK(v < prev);
            prev = v;
        }
        prev = menard_settling_bound(1.0, 0.8, 1.1);
        for (double c : {0.9, 0.95, 0.99}) {
            const double v = menard_settling_bound(1.0, c, 1.1);
            CHECK(v > prev);
            prev = v;
        }
        prev = menard_settling_bound(1.0, 0.9, 1.3);
        for (double b : {1.2, 1.1, 1.05}) {
            const double v = menard_settling_bound(1.0, 0.9, b);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("phi evaluation per family") {
    SUBCASE("linear scales as r^{i+1}") {
        for (double r : {0.5, 1.0, 2.0, 3.0}) {
            auto fam = CorrectionFamily::linear(1, {4.0, 4.0}, r);
            for (double w : {-2.0, 0.3, 1.7}) {
                CHECK(fam.phi(0, w) == doctest::Approx(r * 4.0 * w));
                CHECK(fam.phi(1, w) == doctest::Approx(r * r * 4.0 * w));
            }
        }
    }
    SUBCASE("levant n=2 sign row") {
        auto fam = CorrectionFamily::levant(2, 1.0);  // defaults 2.0, 2.12, 1.1
        CHECK(fam.phi(2, -1.0) == doctest::Approx(-1.1));
        CHECK(fam.phi(2, 0.5) == doctest::Approx(1.1));
    }
    SUBCASE("levant homogeneity: phi_i(lambda^{n+1} w)/phi_i(w) = lambda^{n-i}") {
        auto fam = CorrectionFamily::levant(1, 1.0);
        for (double lam : {0.5, 2.0, 7.0}) {
            for (double w : {-1.3, 0.2, 4.0}) {
                for (int i = 0; i <= 1; ++i) {
                    const double lhs = fam.phi(i, std::pow(lam, 2) * w);
                    const double rhs = std::pow(lam, 1 - i) * fam.phi(i, w);
                    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
                }
            }
        }
    }
    SUBCASE("seeber values") {
        auto fam = CorrectionFamily::seeber(1.0, 1.0);
        CHECK(fam.seeber_k() == doctest::Approx(9.8));
        CHECK(fam.phi(0, 1.0) == doctest::Approx(4.0 * (1.0 + 9.8)));
        CHECK(fam.settling_bound() == doctest::Approx(1.0));
        CHECK(fam.order() == 1);
    }
    SUBCASE("odd families vanish at zero") {
        auto lin = CorrectionFamily::linear(1, {4.0, 4.0}, 1.0);
        auto lev = CorrectionFamily::levant(1, 1.0);
        auto men = CorrectionFamily::menard(1, 1.0, 0.9, 1.1);
        for (int i = 0; i <= 1; ++i) {
            CHECK(lin.phi(i, 0.0) == 0.0);
            CHECK(lev.phi(i, 0.0) == 0.0);
            CHECK(men.phi(i, 0.0) == 0.0);
        }
    }
}

TEST_CASE("admissibility envelope check") {
    SUBCASE("zero start without the probe stays identically zero") {
        auto fam = CorrectionFamily::seeber(1.0, 1.0);
        AdmissibilityOptions opts;
        opts.probe_disturbance = false;
        auto rep = check_admissibility(fam, 3.0, Eigen::Vector2d(0.0, 0.0), opts);
        CHECK(rep.passed);
        CHECK(rep.gamma_fit == 0.0);
        CHECK(rep.max_violation == 0.0);
    }
    SUBCASE("stable linear family passes with a finite envelope constant") {
        std::vector<std::complex<double>> roots{{-2.0, 0.0}, {-2.0, 0.0}};
        auto fam = CorrectionFamily::linear_from_roots(roots, 1.0);
        AdmissibilityOptions opts;
        opts.probe_disturbance = false;
        auto rep = check_admissibility(fam, 0.5, Eigen::Vector2d(1.0, 1.0), opts);
        CHECK(rep.passed);
        CHECK(rep.alpha_used == 0.5);
        CHECK(std::isfinite(rep.gamma_fit));
        CHECK(rep.gamma_fit >= std::sqrt(2.0) * (1.0 - 1e-12));  // at least the initial norm
        CHECK(rep.max_violation == doctest::Approx(1.0));
    }
    SUBCASE("a blown-up run reports failure instead of throwing") {
        // Superlinear correction terms under a coarse step diverge.
        auto fam = CorrectionFamily::menard(1, 1.0, 0.9, 1.3);
        AdmissibilityOptions opts;
        opts.step = 0.05;
        opts.horizon = 10.0;
        auto rep = check_admissibility(fam, 3.0, Eigen::Vector2d(100.0, 100.0), opts);
        CHECK_FALSE(rep.passed);
        CHECK(std::isinf(rep.max_violation));
    }
    SUBCASE("alpha outside the validity interval is rejected") {
        std::vector<std::complex<double>> roots{{-2.0, 0.0}, {-2.0, 0.0}};
        auto fam = CorrectionFamily::linear_from_roots(roots, 1.0);
        CHECK_THROWS_AS((void)check_admissibility(fam, 1.5, Eigen::Vector2d(1.0, 1.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("family constructor restrictions") {
    CHECK_THROWS_AS((void)CorrectionFamily::seeber(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)CorrectionFamily::seeber(1.0, 0.0), std::invalid_argument);
    // Seeber is inherently first-order.
    CHECK(CorrectionFamily::seeber(2.5, 0.5).order() == 1);
    // Menard requires the L = 0 class and carries it.
    CHECK(CorrectionFamily::menard(1, 1.0, 0.9, 1.1).derivative_bound() == 0.0);
    CHECK_THROWS_AS((void)CorrectionFamily::levant(3, 1.0), std::invalid_argument);
    CHECK(CorrectionFamily::menard(1, 1.0, 0.7, 1.1).warnings().size() == 1);

    SUBCASE("validity intervals") {
        auto lin = CorrectionFamily::linear(1, {4.0, 4.0}, 1.0);
        CHECK(lin.admits_alpha(0.5));
        CHECK_FALSE(lin.admits_alpha(1.0));  // I = [0, r)
        auto lev = CorrectionFamily::levant(1, 1.0);
        CHECK(lev.admits_alpha(100.0));
    }
}

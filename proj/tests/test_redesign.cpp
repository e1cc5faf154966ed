#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ptdiff/redesign.hpp"
#include "oracles.hpp"

using namespace ptdiff;
using cd = std::complex<double>;

namespace {

RedesignContext example1_context() {
    RedesignParams p;
    p.n = 1;
    p.alpha = 3.0;
    p.t_c = 1.0;
    p.L = 1.0;
    p.terminal_gains = {1.5, 1.1};
    return RedesignContext::make(p, CorrectionFamily::seeber(1.0, 1.0));
}

}  // namespace

TEST_CASE("compute_eta") {
    CHECK(compute_eta(3.0, 1.0) == doctest::Approx(0.950212931632136).epsilon(1e-9));
    CHECK(compute_eta(5.0, 1.0) == doctest::Approx(0.993262053000915).epsilon(1e-9));
    CHECK(compute_eta(7.3, kInf) == 1.0);
    CHECK(compute_eta(0.0, kInf) == 1.0);
    CHECK_THROWS_AS((void)compute_eta(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)compute_eta(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)compute_eta(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("kappa_max") {
    CHECK(kappa_max(3.0, 1.0, 1.0) == doctest::Approx(6.361845641062556).epsilon(1e-12));
    CHECK(kappa_max(5.0, 1.0, 1.0) == doctest::Approx(29.482631820515313).epsilon(1e-12));
    // alpha -> 0 limit tends to t_f/t_c
    CHECK(kappa_max(1e-9, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS((void)kappa_max(3.0, 1.0, kInf), std::invalid_argument);
}

TEST_CASE("kappa schedule") {
    auto ctx = example1_context();
    const auto& p = ctx.params();

    CHECK(ctx.kappa(0.0) == doctest::Approx(0.316737643877379).epsilon(1e-12));
    CHECK(ctx.kappa(p.t_c) == 1.0);
    CHECK(ctx.kappa(2.0) == 1.0);

    SUBCASE("non-decreasing on [0, t_c) and bounded by kappa_max") {
        const double km = kappa_max(p.alpha, p.t_c, p.t_f);
        double prev = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double t = p.t_c * k / 1000.0 * 0.999999;
            const double v = ctx.kappa(t);
            CHECK(v >= prev);
            CHECK(v <= km * (1.0 + 1e-12));
            prev = v;
        }
        CHECK(ctx.kappa(p.t_c - 1e-12) == doctest::Approx(km).epsilon(1e-6));
        CHECK(ctx.kappa_bound().has_value());
        CHECK(*ctx.kappa_bound() == doctest::Approx(km));
    }

    SUBCASE("unbounded for infinite t_f") {
        RedesignParams p2;
        p2.n = 1;
        p2.alpha = 0.5;
        p2.t_c = 1.0;
        p2.L = 0.0;
        std::vector<cd> roots{{-2.0, 0.0}, {-2.0, 0.0}};
        auto ctx2 = RedesignContext::make(p2, CorrectionFamily::linear_from_roots(roots, 1.0));
        CHECK_FALSE(ctx2.kappa_bound().has_value());
        CHECK(ctx2.kappa(1.0 - 1e-9) > 1e6);  // exceeds any fixed bound near t_c
    }

    SUBCASE("kappa^{-1} dkappa/dt = alpha * kappa (finite differences)") {
        for (double t : {0.1, 0.4, 0.7, 0.9}) {
            const double h = 1e-7;
            const double fd = oracles::central_diff([&](double tt) { return ctx.kappa(tt); }, t, h);
            const double lhs = fd / ctx.kappa(t);
            const double rhs = p.alpha * ctx.kappa(t);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
        }
    }
}

TEST_CASE("structure matrices") {
    SUBCASE("frozen small cases") {
        auto s = build_structure(1, 3.0, 0.0);
        CHECK(s.Q_rho(0, 0) == 1.0);
        CHECK(s.Q_rho(0, 1) == 0.0);
        CHECK(s.Q_rho(1, 0) == -3.0);
        CHECK(s.Q_rho(1, 1) == 1.0);
        CHECK(s.M_power[0] == -3.0);
        CHECK(s.M_power[1] == 9.0);

        auto s5 = build_structure(1, 5.0, 0.0);
        CHECK(s5.Q_rho(1, 0) == -5.0);

        auto s0 = build_structure(0, 2.0, 0.0);
        CHECK(s0.Q_rho(0, 0) == 1.0);
        CHECK(s0.M_power[0] == 0.0);

        auto s2 = build_structure(2, 3.0, 0.0);
        CHECK(s2.Q_rho(0, 0) == 1.0);
        CHECK(s2.Q_rho(1, 0) == -9.0);    // -3a
        CHECK(s2.Q_rho(2, 0) == 36.0);    // 4a^2
        CHECK(s2.Q_rho(2, 1) == -6.0);    // -2a
        CHECK(s2.Q_rho(1, 1) == 1.0);
        CHECK(s2.Q_rho(2, 2) == 1.0);
    }

    SUBCASE("columns match the plain-loop oracle") {
        for (int n : {0, 1, 2, 3, 5}) {
            for (double alpha : {0.5, 3.0}) {
                for (double rho : {0.0, 1.0, n + 1.0}) {
                    auto s = build_structure(n, alpha, rho);
                    for (int k = 0; k <= n; ++k) {
                        auto col = oracles::shift_power_times_b(n, alpha, rho, k);
                        for (int i = 0; i <= n; ++i)
                            CHECK(s.Q_rho(i, n - k) == doctest::Approx(col[i]).epsilon(1e-13));
                    }
                    auto mp = oracles::shift_power_times_b(n, alpha, rho, n + 1);
                    for (int i = 0; i <= n; ++i)
                        CHECK(s.M_power[i] == doctest::Approx(mp[i]).epsilon(1e-13));
                }
            }
        }
    }

    SUBCASE("unit lower-triangular, exhaustive grid up to n = 8") {
        for (int n = 0; n <= 8; ++n) {
            for (double alpha : {0.5, 1.0, 3.0, 5.0}) {
                for (double rho : {0.0, 1.0, n + 1.0}) {
                    auto s = build_structure(n, alpha, rho);
                    for (int i = 0; i <= n; ++i) {
                        CHECK(s.Q_rho(i, i) == 1.0);  // exact
                        for (int j = i + 1; j <= n; ++j) CHECK(s.Q_rho(i, j) == 0.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("context validation") {
    RedesignParams p;
    p.n = 1;
    p.alpha = 3.0;
    p.t_c = 1.0;
    p.L = 1.0;
    auto fam = CorrectionFamily::seeber(1.0, 1.0);

    SUBCASE("beta defaults to twice the lower bound") {
        auto ctx = RedesignContext::make(p, fam);
        const double bmin = std::pow(3.0 / compute_eta(3.0, 1.0), 2.0);
        CHECK(ctx.params().beta == doctest::Approx(2.0 * bmin).epsilon(1e-12));
    }
    SUBCASE("beta below the bound is rejected") {
        RedesignParams bad = p;
        bad.t_f = 1.0;
        bad.eta = compute_eta(3.0, 1.0);
        bad.beta = 0.5 * bad.beta_min();
        CHECK_THROWS_AS((void)RedesignContext::make(bad, fam), std::invalid_argument);
    }
    SUBCASE("alpha outside the family interval is rejected") {
        RedesignParams lp = p;
        lp.alpha = 1.5;
        lp.L = 0.0;
        std::vector<cd> roots{{-2.0, 0.0}, {-2.0, 0.0}};
        auto lin = CorrectionFamily::linear_from_roots(roots, 1.0);  // I = [0, 1)
        CHECK_THROWS_AS((void)RedesignContext::make(lp, lin), std::invalid_argument);
    }
    SUBCASE("rho range and order mismatch") {
        RedesignParams bad = p;
        bad.rho = 2.5;  // > n+1
        CHECK_THROWS_AS((void)RedesignContext::make(bad, fam), std::invalid_argument);
        RedesignParams mism = p;
        mism.n = 2;
        mism.terminal_gains = {2.0, 2.12, 1.1};
        CHECK_THROWS_AS((void)RedesignContext::make(mism, fam), std::invalid_argument);
    }
    SUBCASE("default mu scales with L") {
        auto ctx = RedesignContext::make(p, fam);
        CHECK(ctx.params().mu == doctest::Approx(1e-3));
        RedesignParams pL = p;
        pL.L = 50.0;
        auto fam50 = CorrectionFamily::seeber(50.0, 1.0);
        CHECK(RedesignContext::make(pL, fam50).params().mu == doctest::Approx(5e-2));
    }
}

TEST_CASE("terminal corrections") {
    auto ctx = example1_context();
    CHECK(ctx.g_terminal(0, 4.0) == doctest::Approx(3.0));     // 1.5 * 1 * sqrt(4)
    CHECK(ctx.g_terminal(1, -0.5) == doctest::Approx(-1.1));   // sign row

    SUBCASE("mu floor applies when L = 0") {
        RedesignParams p;
        p.n = 1;
        p.alpha = 3.0;
        p.t_c = 1.0;
        p.L = 0.0;
        p.mu = 0.01;
        p.terminal_gains = {1.5, 1.1};
        auto ctx0 = RedesignContext::make(p, CorrectionFamily::menard(1, 1.0, 0.9, 1.1));
        CHECK(ctx0.g_terminal(1, 2.0) == doctest::Approx(0.011));
    }
    SUBCASE("last row has magnitude l_n max(L, mu) for any nonzero e0") {
        for (double e0 : {-7.0, -0.1, 0.3, 42.0})
            CHECK(std::abs(ctx.g_terminal(1, e0)) == doctest::Approx(1.1));
        CHECK(ctx.g_terminal(1, 0.0) == 0.0);
    }
}

TEST_CASE("f and h corrections") {
    SUBCASE("zero error gives zero vector for every family and rho") {
        auto ctx = example1_context();
        for (double t : {0.0, 0.5, 2.0}) {
            auto f = ctx.f_vec(0.0, t);
            CHECK(f.norm() == 0.0);
            Eigen::VectorXd h;
            ctx.h_vec(0.0, t, h);
            CHECK(h.norm() == 0.0);
        }
    }

    SUBCASE("second term for n=1, rho=0 is [-a e0, a^2 e0]") {
        // Levant family with L = 0 makes Phi vanish, isolating the M term.
        RedesignParams p;
        p.n = 1;
        p.alpha = 3.0;
        p.t_c = 1.0;
        p.L = 0.0;
        p.terminal_gains = {1.5, 1.1};
        auto ctx = RedesignContext::make(p, CorrectionFamily::levant(1, 0.0, {1.5, 1.1}));
        for (double e0 : {1.0, -2.5}) {
            auto f = ctx.f_vec(e0, 0.0);
            CHECK(f[0] == doctest::Approx(-3.0 * e0));
            CHECK(f[1] == doctest::Approx(9.0 * e0));
        }
    }

    SUBCASE("frozen chain example: linear base formula at t=0, e0=1") {
        // Direct evaluation of the switched-correction chain with hand-sized
        // parameters (alpha=3, t_c=1, eta from t_f=1, beta at its bound,
        // linear phi with r=1 and gains 4, 4).
        auto S = build_structure(1, 3.0, 0.0);
        const double eta = compute_eta(3.0, 1.0);
        const double beta = std::pow(3.0 * 1.0 / eta, 2.0);
        const double e0 = 1.0;
        Eigen::Vector2d phi(4.0 * e0 / beta, 4.0 * e0 / beta);
        Eigen::VectorXd f = beta * (S.Q_rho * phi) + e0 * S.M_power;
        const double kappa0 = eta / (3.0 * 1.0);
        CHECK(kappa0 * f[0] == doctest::Approx(0.316737643877379).epsilon(1e-9));
    }

    SUBCASE("odd in e0 when all phi rows are odd") {
        auto ctx = example1_context();
        for (double t : {0.0, 0.3, 0.8}) {
            for (double e0 : {0.17, 1.0, 9.4}) {
                Eigen::VectorXd fp = ctx.f_vec(e0, t), fm = ctx.f_vec(-e0, t);
                for (int i = 0; i < fp.size(); ++i) CHECK(fm[i] == -fp[i]);
            }
        }
    }

    SUBCASE("terminal branch after t_c and with the override") {
        auto ctx = example1_context();
        CHECK(ctx.h_correction(0, 4.0, 1.0) == doctest::Approx(ctx.g_terminal(0, 4.0)));
        CHECK(ctx.h_correction(0, 4.0, 5.0) == doctest::Approx(ctx.g_terminal(0, 4.0)));
        CHECK(ctx.h_correction(1, 4.0, 0.2, /*terminal=*/true) ==
              doctest::Approx(ctx.g_terminal(1, 4.0)));
    }

    SUBCASE("rho = 0 path agrees bitwise with a rho-free reference") {
        auto ctx = example1_context();
        const auto& p = ctx.params();
        const auto& S = ctx.structure();
        for (double t : {0.0, 0.25, 0.6, 0.95}) {
            for (double e0 : {-3.2, 0.04, 1.0, 8.5}) {
                Eigen::VectorXd phi(p.n + 1);
                const double w = (1.0 * e0) / p.beta;
                for (int i = 0; i <= p.n; ++i) phi[i] = ctx.family().phi(i, w);
                Eigen::VectorXd f_ref = p.beta * (S.Q_rho * phi) + (1.0 * e0) * S.M_power;
                for (int i = 0; i <= p.n; ++i) {
                    const double h_ref = std::pow(ctx.kappa(t), 1.0 + double(i)) * f_ref[i];
                    CHECK(ctx.h_correction(i, e0, t) == h_ref);  // bitwise
                }
            }
        }
    }

    SUBCASE("h_vec agrees with per-row h_correction") {
        auto ctx = example1_context();
        Eigen::VectorXd h;
        for (double t : {0.0, 0.5, 1.2}) {
            for (double e0 : {-1.0, 0.5}) {
                ctx.h_vec(e0, t, h);
                for (int i = 0; i <= 1; ++i)
                    CHECK(h[i] == doctest::Approx(ctx.h_correction(i, e0, t)).epsilon(1e-14));
            }
        }
    }
}

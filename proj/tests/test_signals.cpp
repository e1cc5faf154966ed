#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptdiff/signals.hpp"
#include "oracles.hpp"

using namespace ptdiff;

TEST_CASE("preset values") {
    auto fig1a = make_preset("fig1a");
    CHECK(fig1a.value(0.0) == doctest::Approx(0.75));
    CHECK(fig1a.derivative(1, 0.0) == doctest::Approx(1.025));
    CHECK(fig1a.derivative_bound(2) == doctest::Approx(1.0));

    auto fig1c = make_preset("fig1c");
    CHECK(fig1c.derivative_bound(2) == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-9));

    auto fig2 = make_preset("fig2");
    CHECK(fig2.derivative_bound(2) == doctest::Approx(3.25));

    CHECK_THROWS_AS((void)make_preset("fig9"), std::invalid_argument);

    SUBCASE("fig1b and fig1d alias the fig1a signal") {
        CHECK(make_preset("fig1b").value(0.3) == fig1a.value(0.3));
        CHECK(make_preset("fig1d").derivative(1, 0.7) == fig1a.derivative(1, 0.7));
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    const double h = 1e-6;
    for (const char* name : {"fig1a", "fig1c", "fig2"}) {
        auto sig = make_preset(name);
        for (int order = 1; order <= 3; ++order) {
            for (double t : {0.0, 0.31, 1.0, 1.77}) {
                const double fd = oracles::central_diff(
                    [&](double tt) { return sig.derivative(order - 1, tt); }, t, h);
                const double an = sig.derivative(order, t);
                CHECK(an == doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(an))));
            }
        }
    }
}

TEST_CASE("derivative bounds") {
    SUBCASE("pure linear term has zero second-derivative bound") {
        TestSignal lin({{SignalTerm::Kind::Linear, 2.0}});
        CHECK(lin.derivative_bound(2) == 0.0);
        CHECK(lin.derivative_bound(1) == doctest::Approx(2.0));
    }
    SUBCASE("polynomial terms below their degree have no finite bound") {
        TestSignal quad({{SignalTerm::Kind::Polynomial, 1.0, 0.0, 2}});
        CHECK(std::isinf(quad.derivative_bound(1)));
        CHECK(quad.derivative_bound(2) == doctest::Approx(2.0));
        CHECK(quad.derivative_bound(3) == 0.0);
    }
    SUBCASE("sub-additive under concatenation, equal for distinct frequencies") {
        TestSignal a({{SignalTerm::Kind::Cosine, 0.75, 1.0}});
        TestSignal b({{SignalTerm::Kind::Sine, 0.0025, 10.0}});
        TestSignal ab({{SignalTerm::Kind::Cosine, 0.75, 1.0}, {SignalTerm::Kind::Sine, 0.0025, 10.0}});
        for (int order = 1; order <= 3; ++order) {
            const double sum = a.derivative_bound(order) + b.derivative_bound(order);
            CHECK(ab.derivative_bound(order) <= sum * (1.0 + 1e-12));
            CHECK(ab.derivative_bound(order) == doctest::Approx(sum));
        }
        // Same-frequency pairs combine in quadrature, strictly below the sum.
        TestSignal same({{SignalTerm::Kind::Cosine, 1.0, 10.0}, {SignalTerm::Kind::Sine, 1.0, 10.0}});
        CHECK(same.derivative_bound(2) < 200.0);
        CHECK(same.derivative_bound(2) == doctest::Approx(100.0 * std::sqrt(2.0)));
    }
}

TEST_CASE("noise streams") {
    SUBCASE("zero std gives exact signal") {
        auto sig = make_preset("fig1a");
        NoiseStream off(NoiseSpec{0.0, 123});
        for (double t : {0.0, 0.5, 1.5})
            CHECK(sample_measurement(sig, off, t, 7) == sig.value(t));
    }
    SUBCASE("same seed, bitwise identical; different seed, different draws") {
        NoiseStream a(NoiseSpec{0.1, 42}), b(NoiseSpec{0.1, 42}), c(NoiseSpec{0.1, 43});
        bool any_diff = false;
        for (std::uint64_t k = 0; k < 1000; ++k) {
            CHECK(a.value(k) == b.value(k));
            any_diff |= (a.value(k) != c.value(k));
        }
        CHECK(any_diff);
    }
    SUBCASE("moments are roughly right") {
        NoiseStream s(NoiseSpec{0.1, 7});
        double sum = 0.0, sq = 0.0;
        const int N = 200000;
        for (int k = 0; k < N; ++k) {
            const double v = s.value(std::uint64_t(k));
            sum += v;
            sq += v * v;
        }
        const double mean = sum / N;
        const double var = sq / N - mean * mean;
        CHECK(std::abs(mean) < 1e-3);
        CHECK(var == doctest::Approx(0.01).epsilon(0.02));
    }
}

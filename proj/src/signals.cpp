#include "ptdiff/signals.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ptdiff {

namespace {

// Falling factorial degree*(degree-1)*...*(degree-order+1).
double falling(int degree, int order) {
    double f = 1.0;
    for (int j = 0; j < order; ++j) f *= double(degree - j);
    return f;
}

}  // namespace

double SignalTerm::value(int order, double t) const {
    switch (kind) {
        case Kind::Cosine: {
            // d^m/dt^m cos(wt) = w^m cos(wt + m*pi/2)
            const double w = frequency;
            return amplitude * std::pow(w, order) * std::cos(w * t + order * M_PI_2);
        }
        case Kind::Sine: {
            const double w = frequency;
            return amplitude * std::pow(w, order) * std::sin(w * t + order * M_PI_2);
        }
        case Kind::Linear:
            if (order == 0) return amplitude * t;
            if (order == 1) return amplitude;
            return 0.0;
        case Kind::Polynomial:
            if (order > degree) return 0.0;
            return amplitude * falling(degree, order) * std::pow(t, degree - order);
    }
    return 0.0;
}

double TestSignal::derivative(int order, double t) const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.value(order, t);
    return s;
}

double TestSignal::derivative_bound(int order) const {
    if (order < 1) throw std::invalid_argument("derivative_bound: order must be >= 1");
    double bound = 0.0;
    // Per frequency, accumulate the cos/sin coefficients of the order-th
    // derivative and combine them in quadrature.
    std::map<double, std::pair<double, double>> by_freq;  // freq -> (cos coef, sin coef)
    for (const auto& term : terms_) {
        switch (term.kind) {
            case SignalTerm::Kind::Cosine:
            case SignalTerm::Kind::Sine: {
                const double mag = term.amplitude * std::pow(term.frequency, order);
                // Phase shift by order quarter-turns maps cos/sin onto +-cos/+-sin.
                int phase = order % 4;
                bool is_cos = (term.kind == SignalTerm::Kind::Cosine);
                double sign = 1.0;
                // cos: 0 -> cos, 1 -> -sin, 2 -> -cos, 3 -> sin
                // sin: 0 -> sin, 1 -> cos, 2 -> -sin, 3 -> -cos
                bool lands_on_cos;
                if (is_cos) {
                    lands_on_cos = (phase % 2 == 0);
                    sign = (phase == 1 || phase == 2) ? -1.0 : 1.0;
                } else {
                    lands_on_cos = (phase % 2 == 1);
                    sign = (phase == 2 || phase == 3) ? -1.0 : 1.0;
                }
                auto& [c, s] = by_freq[term.frequency];
                (lands_on_cos ? c : s) += sign * mag;
                break;
            }
            case SignalTerm::Kind::Linear:
                if (order == 1) bound += std::abs(term.amplitude);
                break;
            case SignalTerm::Kind::Polynomial:
                if (order < term.degree) return std::numeric_limits<double>::infinity();
                if (order == term.degree) bound += std::abs(term.amplitude) * falling(term.degree, order);
                break;
        }
    }
    for (const auto& [freq, cs] : by_freq) bound += std::hypot(cs.first, cs.second);
    return bound;
}

TestSignal make_preset(const std::string& name) {
    using K = SignalTerm::Kind;
    if (name == "fig1a" || name == "fig1b" || name == "fig1d")
        return TestSignal({{K::Cosine, 0.75, 1.0},
                           {K::Sine, 0.0025, 10.0},
                           {K::Linear, 1.0}});
    if (name == "fig1c")
        return TestSignal({{K::Cosine, 0.1, 10.0},
                           {K::Sine, 0.1, 10.0},
                           {K::Linear, 1.0}});
    if (name == "fig2")
        return TestSignal({{K::Cosine, 0.75, 1.0},
                           {K::Sine, 0.025, 10.0},
                           {K::Linear, 1.0}});
    throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double to_unit(std::uint64_t bits) {
    // (0, 1]: top 53 bits, never exactly 0 so log() below stays finite.
    return (double(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double NoiseStream::value(std::uint64_t index) const {
    if (spec_.std_dev == 0.0) return 0.0;
    // Counter-based Box-Muller: random access, bitwise reproducible per seed.
    const std::uint64_t h1 = splitmix64(spec_.seed ^ splitmix64(index));
    const std::uint64_t h2 = splitmix64(h1 ^ 0xd1b54a32d192ed03ULL);
    const double u1 = to_unit(h1);
    const double u2 = to_unit(h2);
    const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return spec_.std_dev * g;
}

double sample_measurement(const TestSignal& sig, const NoiseStream& noise, double t,
                          std::uint64_t grid_index) {
    return sig.value(t) + noise.value(grid_index);
}

}  // namespace ptdiff

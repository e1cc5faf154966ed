#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ptdiff {

/// One additive term of an analytic test signal.
struct SignalTerm {
    enum class Kind { Cosine, Sine, Linear, Polynomial };
    Kind kind = Kind::Cosine;
    double amplitude = 1.0;
    double frequency = 1.0;  ///< rad/s for sinusoids; unused otherwise
    int degree = 1;          ///< Polynomial only: amplitude * t^degree

    double value(int deriv_order, double t) const;
};

/// Sum of analytic terms with exact derivative closures. Immutable.
class TestSignal {
public:
    TestSignal() = default;
    explicit TestSignal(std::vector<SignalTerm> terms) : terms_(std::move(terms)) {}

    double value(double t) const { return derivative(0, t); }
    double derivative(int order, double t) const;

    /// Supremum of |y^{(order)}|. Same-frequency sine/cosine pairs combine in
    /// quadrature (exact); distinct frequencies add. Polynomial terms of
    /// degree >= order make the bound infinite.
    double derivative_bound(int order) const;

    const std::vector<SignalTerm>& terms() const { return terms_; }

private:
    std::vector<SignalTerm> terms_;
};

/// Named measurement scenarios used throughout the test harness.
/// fig1a also serves the fig1b and fig1d runs.
TestSignal make_preset(const std::string& name);

struct NoiseSpec {
    double std_dev = 0.0;
    std::uint64_t seed = 0;
};

/// Deterministic Gaussian stream with random access by sample index:
/// value(k) depends only on (seed, k). Streams from equal seeds are
/// bitwise identical.
class NoiseStream {
public:
    NoiseStream() = default;
    explicit NoiseStream(NoiseSpec spec) : spec_(spec) {}

    double value(std::uint64_t index) const;
    const NoiseSpec& spec() const { return spec_; }

private:
    NoiseSpec spec_{};
};

/// y(t) plus the per-grid-index noise draw (noiseless when `noise` has zero
/// standard deviation).
double sample_measurement(const TestSignal& sig, const NoiseStream& noise, double t,
                          std::uint64_t grid_index);

}  // namespace ptdiff

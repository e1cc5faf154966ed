#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptdiff/redesign.hpp"
#include "ptdiff/signals.hpp"

namespace ptdiff {

using Disturbance = std::function<double(double)>;

/// Thrown when an integration produces a non-finite state.
struct BlowupError : std::runtime_error {
    double time;
    explicit BlowupError(double t)
        : std::runtime_error("state became non-finite at t = " + std::to_string(t)), time(t) {}
};

struct SimOptions {
    double step = 1e-5;
    int stride = 100;  ///< record every stride-th sample
};

/// Optional early-switch rule: once |e_0| has stayed below tol for
/// dwell_samples consecutive integration steps, the correction functions
/// switch to their terminal branch for the rest of the run.
struct MonitorSpec {
    bool enabled = false;
    double tol = 1e-6;
    int dwell_samples = 100;
};

struct TrajectoryMeta {
    double t0 = 0.0;
    double step = 0.0;
    int stride = 1;
    std::uint64_t seed = 0;
    std::optional<double> switch_time;  ///< monitor latch instant, if it fired
};

/// Uniformly sampled record of a run. All per-sample arrays have equal
/// length; optional blocks (gains, signal, errors) are either empty or full.
class Trajectory {
public:
    std::vector<double> times;
    int state_dim = 0;
    std::vector<std::string> state_names;
    std::vector<double> states;    ///< row-major, samples x state_dim
    std::vector<double> gains;     ///< kappa(t) samples (optional)
    std::vector<double> y;         ///< clean signal (optional)
    int deriv_count = 0;
    std::vector<double> y_derivs;  ///< row-major, samples x deriv_count, orders 1..deriv_count
    std::vector<double> noise;     ///< per-sample measurement noise (optional)
    int error_dim = 0;
    std::vector<double> errors;    ///< row-major, samples x error_dim (optional)
    TrajectoryMeta meta;

    std::size_t size() const { return times.size(); }
    Eigen::Map<const Eigen::VectorXd> state(std::size_t k) const {
        return {states.data() + k * state_dim, state_dim};
    }
    /// Residual samples used for settling detection: the explicit error block
    /// when present, otherwise the states themselves.
    const std::vector<double>& residuals() const { return errors.empty() ? states : errors; }
    int residual_dim() const { return errors.empty() ? state_dim : error_dim; }
    double residual_inf_norm(std::size_t k) const;

    void write_csv(const std::string& path) const;
};

using Rhs = std::function<void(std::int64_t k, double t, const Eigen::VectorXd& x,
                               Eigen::VectorXd& dx)>;

/// Plain forward Euler with a fixed step; time-varying terms are evaluated at
/// the left endpoint of each step. The horizon is rounded to a whole number
/// of steps; every stride-th sample plus the final one is recorded. Throws
/// BlowupError on non-finite states.
Trajectory euler_integrate(const Rhs& rhs, const Eigen::VectorXd& x0, double t0, double t1,
                           const SimOptions& opts);

/// Disturbance-mapped input of the auxiliary system:
/// beta^{-1} (alpha t_c/eta)^{n+1-rho} exp(-alpha (n+1-rho) tau) d(t(tau)).
double pi_of_tau(double tau, const RedesignParams& p, const Disturbance& d);

/// Right-hand side of the redesigned error dynamics. Owns its monitor state
/// and scratch storage; one instance per integration.
class ErrorDynamics {
public:
    ErrorDynamics(const RedesignContext& ctx, Disturbance d, MonitorSpec monitor = {});
    void operator()(std::int64_t k, double t, const Eigen::VectorXd& e, Eigen::VectorXd& de);
    std::optional<double> switch_time() const { return switch_time_; }
    bool terminal_latched() const { return latched_; }

private:
    void update_monitor(double e0, double t);
    const RedesignContext* ctx_;
    Disturbance d_;
    MonitorSpec mon_;
    int below_ = 0;
    bool latched_ = false;
    std::optional<double> switch_time_;
    Eigen::VectorXd h_;

    friend class DiffDynamics;
    friend class FilterDynamics;
};

/// Differentiator state dynamics driven by a measured signal.
class DiffDynamics {
public:
    DiffDynamics(const RedesignContext& ctx, const TestSignal& sig, NoiseStream noise, int stride,
                 MonitorSpec monitor = {});
    void operator()(std::int64_t k, double t, const Eigen::VectorXd& z, Eigen::VectorXd& dz);
    std::optional<double> switch_time() const { return switch_time_; }
    double last_measurement() const { return y_meas_; }

private:
    void update_monitor(double e0, double t);
    const RedesignContext* ctx_;
    const TestSignal* sig_;
    NoiseStream noise_;
    int stride_;
    MonitorSpec mon_;
    int below_ = 0;
    bool latched_ = false;
    std::optional<double> switch_time_;
    double y_meas_ = 0.0;
    Eigen::VectorXd h_;
};

/// Filtering chain with n_f low-pass states ahead of n_d+1 estimates;
/// the correction functions must be built for order n = n_f + n_d.
class FilterDynamics {
public:
    FilterDynamics(const RedesignContext& ctx, int n_f, int n_d, const TestSignal& sig,
                   NoiseStream noise, int stride, MonitorSpec monitor = {});
    void operator()(std::int64_t k, double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx);
    std::optional<double> switch_time() const { return switch_time_; }
    int n_f() const { return n_f_; }
    int n_d() const { return n_d_; }

private:
    void update_monitor(double e0, double t);
    const RedesignContext* ctx_;
    int n_f_, n_d_;
    const TestSignal* sig_;
    NoiseStream noise_;
    int stride_;
    MonitorSpec mon_;
    int below_ = 0;
    bool latched_ = false;
    std::optional<double> switch_time_;
    Eigen::VectorXd h_;
};

/// Time-invariant auxiliary chain built from the base correction functions.
class AuxDynamics {
public:
    AuxDynamics(const CorrectionFamily& family, std::function<double(double)> pi);
    void operator()(std::int64_t k, double tau, const Eigen::VectorXd& chi, Eigen::VectorXd& dchi);

private:
    const CorrectionFamily* phi_;
    std::function<double(double)> pi_;
};

/// Error-coordinate simulation of the redesigned differentiator.
Trajectory simulate_error(const RedesignContext& ctx, const Eigen::VectorXd& e0,
                          const Disturbance& d, double t1, const SimOptions& opts,
                          MonitorSpec monitor = {});

/// Differentiator-coordinate simulation; records gains, clean signal,
/// exact derivatives, noise draws and the error block z_i - y^{(i)}.
Trajectory simulate_differentiator(const RedesignContext& ctx, const Eigen::VectorXd& z0,
                                   const TestSignal& sig, const NoiseSpec& noise, double t1,
                                   const SimOptions& opts, MonitorSpec monitor = {});

/// Filtering-differentiator simulation. State order: w_1..w_{n_f}, z_0..z_{n_d}.
/// The error block holds w_1..w_{n_f}, z_i - y^{(i)}.
Trajectory simulate_filtering(const RedesignContext& ctx, int n_f, int n_d,
                              const Eigen::VectorXd& x0, const TestSignal& sig,
                              const NoiseSpec& noise, double t1, const SimOptions& opts,
                              MonitorSpec monitor = {});

/// Auxiliary-system simulation on a uniform tau grid.
Trajectory simulate_aux(const CorrectionFamily& family, const Eigen::VectorXd& chi0,
                        const std::function<double(double)>& pi, double tau1,
                        const SimOptions& opts);

}  // namespace ptdiff

#include "ptdiff/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include "ptdiff/analysis.hpp"

namespace ptdiff {

namespace {

// Shared stepping core. on_step(k, t_k, x_k) runs for k = 0 (initial state)
// and after every accepted step; it handles recording.
template <typename RhsT, typename Observer>
void integrate_loop(RhsT&& rhs, Eigen::VectorXd& x, double t0, std::int64_t steps, double h,
                    Observer&& on_step) {
    Eigen::VectorXd dx(x.size());
    on_step(std::int64_t{0}, t0, x);
    for (std::int64_t k = 0; k < steps; ++k) {
        const double t = t0 + h * double(k);
        rhs(k, t, x, dx);
        x.noalias() += h * dx;
        if (!x.allFinite()) throw BlowupError(t + h);
        on_step(k + 1, t0 + h * double(k + 1), x);
    }
}

std::int64_t step_count(double t0, double t1, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("integration step must be > 0");
    if (!(t1 > t0)) throw std::invalid_argument("integration horizon must be > start time");
    const double raw = (t1 - t0) / h;
    std::int64_t n = std::llround(raw);
    if (n < 1) n = 1;
    return n;
}

struct Recorder {
    Trajectory* traj;
    int stride;
    std::int64_t total;
    void operator()(std::int64_t k, double t, const Eigen::VectorXd& x) const {
        if (k % stride != 0 && k != total) return;
        traj->times.push_back(t);
        traj->states.insert(traj->states.end(), x.data(), x.data() + x.size());
    }
};

}  // namespace

double Trajectory::residual_inf_norm(std::size_t k) const {
    const auto& r = residuals();
    const int dim = residual_dim();
    double m = 0.0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(r[k * dim + i]));
    return m;
}

void Trajectory::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "t";
    for (const auto& n : state_names) out << "," << n;
    if (!gains.empty()) out << ",kappa";
    if (!y.empty()) out << ",y";
    for (int i = 1; i <= deriv_count; ++i) out << ",y_d" << i;
    if (!noise.empty()) out << ",noise";
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.12g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g", times[k]);
        out << buf;
        for (int i = 0; i < state_dim; ++i) put(states[k * state_dim + i]);
        if (!gains.empty()) put(gains[k]);
        if (!y.empty()) put(y[k]);
        for (int i = 0; i < deriv_count; ++i) put(y_derivs[k * deriv_count + i]);
        if (!noise.empty()) put(noise[k]);
        out << "\n";
    }
}

Trajectory euler_integrate(const Rhs& rhs, const Eigen::VectorXd& x0, double t0, double t1,
                           const SimOptions& opts) {
    if (opts.stride < 1) throw std::invalid_argument("record stride must be >= 1");
    const std::int64_t steps = step_count(t0, t1, opts.step);
    Trajectory traj;
    traj.state_dim = static_cast<int>(x0.size());
    for (int i = 0; i < traj.state_dim; ++i) traj.state_names.push_back("x_" + std::to_string(i));
    traj.meta = {t0, opts.step, opts.stride, 0, std::nullopt};
    Eigen::VectorXd x = x0;
    integrate_loop([&](std::int64_t k, double t, const Eigen::VectorXd& xx, Eigen::VectorXd& dx)
                       { rhs(k, t, xx, dx); },
                   x, t0, steps, opts.step, Recorder{&traj, opts.stride, steps});
    return traj;
}

double pi_of_tau(double tau, const RedesignParams& p, const Disturbance& d) {
    if (tau < 0.0) throw std::invalid_argument("pi_of_tau: tau must be >= 0");
    if (!d) return 0.0;
    const double ex = double(p.n) + 1.0 - p.rho;
    const double pref = std::pow(p.alpha * p.t_c / p.eta, ex) / p.beta;
    return pref * std::exp(-p.alpha * ex * tau) * d(inverse_warp(tau, p));
}

ErrorDynamics::ErrorDynamics(const RedesignContext& ctx, Disturbance d, MonitorSpec monitor)
    : ctx_(&ctx), d_(std::move(d)), mon_(monitor) {}

void ErrorDynamics::update_monitor(double e0, double t) {
    if (!mon_.enabled || latched_) return;
    below_ = (std::abs(e0) < mon_.tol) ? below_ + 1 : 0;
    if (below_ >= mon_.dwell_samples) {
        latched_ = true;
        switch_time_ = t;
    }
}

void ErrorDynamics::operator()(std::int64_t, double t, const Eigen::VectorXd& e,
                               Eigen::VectorXd& de) {
    update_monitor(e[0], t);
    ctx_->h_vec(e[0], t, h_, latched_);
    const int n = ctx_->params().n;
    de.resize(n + 1);
    for (int i = 0; i < n; ++i) de[i] = -h_[i] + e[i + 1];
    de[n] = -h_[n] + (d_ ? d_(t) : 0.0);
}

DiffDynamics::DiffDynamics(const RedesignContext& ctx, const TestSignal& sig, NoiseStream noise,
                           int stride, MonitorSpec monitor)
    : ctx_(&ctx), sig_(&sig), noise_(noise), stride_(stride), mon_(monitor) {}

void DiffDynamics::update_monitor(double e0, double t) {
    if (!mon_.enabled || latched_) return;
    below_ = (std::abs(e0) < mon_.tol) ? below_ + 1 : 0;
    if (below_ >= mon_.dwell_samples) {
        latched_ = true;
        switch_time_ = t;
    }
}

void DiffDynamics::operator()(std::int64_t k, double t, const Eigen::VectorXd& z,
                              Eigen::VectorXd& dz) {
    // Noise is held constant across each recorded block of the grid.
    y_meas_ = sample_measurement(*sig_, noise_, t, std::uint64_t(k / stride_));
    const double e0 = z[0] - y_meas_;
    update_monitor(e0, t);
    ctx_->h_vec(e0, t, h_, latched_);
    const int n = ctx_->params().n;
    dz.resize(n + 1);
    for (int i = 0; i < n; ++i) dz[i] = -h_[i] + z[i + 1];
    dz[n] = -h_[n];
}

FilterDynamics::FilterDynamics(const RedesignContext& ctx, int n_f, int n_d,
                               const TestSignal& sig, NoiseStream noise, int stride,
                               MonitorSpec monitor)
    : ctx_(&ctx), n_f_(n_f), n_d_(n_d), sig_(&sig), noise_(noise), stride_(stride), mon_(monitor) {
    if (n_f < 1) throw std::invalid_argument("FilterDynamics: n_f must be >= 1");
    if (n_d < 0) throw std::invalid_argument("FilterDynamics: n_d must be >= 0");
    if (ctx.params().n != n_f + n_d)
        throw std::invalid_argument("FilterDynamics: correction order must equal n_f + n_d");
}

void FilterDynamics::update_monitor(double e0, double t) {
    if (!mon_.enabled || latched_) return;
    below_ = (std::abs(e0) < mon_.tol) ? below_ + 1 : 0;
    if (below_ >= mon_.dwell_samples) {
        latched_ = true;
        switch_time_ = t;
    }
}

void FilterDynamics::operator()(std::int64_t k, double t, const Eigen::VectorXd& x,
                                Eigen::VectorXd& dx) {
    const int n = ctx_->params().n;
    if (x.size() != n + 1) throw std::invalid_argument("FilterDynamics: state dimension mismatch");
    const double y_meas = sample_measurement(*sig_, noise_, t, std::uint64_t(k / stride_));
    const double w1 = x[0];
    update_monitor(w1, t);
    ctx_->h_vec(w1, t, h_, latched_);
    dx.resize(n + 1);
    // w-block: rows 0 .. n_f-1, the last one injects z_0 - y
    for (int j = 0; j + 1 < n_f_; ++j) dx[j] = -h_[j] + x[j + 1];
    dx[n_f_ - 1] = -h_[n_f_ - 1] + (x[n_f_] - y_meas);
    // z-block: rows n_f .. n
    for (int j = n_f_; j < n; ++j) dx[j] = -h_[j] + x[j + 1];
    dx[n] = -h_[n];
}

AuxDynamics::AuxDynamics(const CorrectionFamily& family, std::function<double(double)> pi)
    : phi_(&family), pi_(std::move(pi)) {}

void AuxDynamics::operator()(std::int64_t, double tau, const Eigen::VectorXd& chi,
                             Eigen::VectorXd& dchi) {
    const int n = phi_->order();
    dchi.resize(n + 1);
    for (int i = 0; i < n; ++i) dchi[i] = -phi_->phi(i, chi[0]) + chi[i + 1];
    dchi[n] = -phi_->phi(n, chi[0]) + (pi_ ? pi_(tau) : 0.0);
}

namespace {

// Recording shared by the three differentiator-style drivers.
struct RichRecorder {
    Trajectory* traj;
    int stride;
    std::int64_t total;
    const RedesignContext* ctx;
    const TestSignal* sig = nullptr;
    const NoiseStream* noise = nullptr;
    int n_f = 0;  // 0 for plain coordinates

    void operator()(std::int64_t k, double t, const Eigen::VectorXd& x) const {
        if (k % stride != 0 && k != total) return;
        traj->times.push_back(t);
        traj->states.insert(traj->states.end(), x.data(), x.data() + x.size());
        traj->gains.push_back(ctx->kappa(t));
        if (!sig) return;
        const int n = ctx->params().n;
        traj->y.push_back(sig->value(t));
        for (int i = 1; i <= traj->deriv_count; ++i) traj->y_derivs.push_back(sig->derivative(i, t));
        traj->noise.push_back(noise->value(std::uint64_t(k / stride)));
        // error block
        if (n_f == 0) {
            for (int i = 0; i <= n; ++i) traj->errors.push_back(x[i] - sig->derivative(i, t));
        } else {
            for (int i = 0; i < n_f; ++i) traj->errors.push_back(x[i]);
            for (int i = 0; i <= n - n_f; ++i)
                traj->errors.push_back(x[n_f + i] - sig->derivative(i, t));
        }
    }
};

}  // namespace

Trajectory simulate_error(const RedesignContext& ctx, const Eigen::VectorXd& e0,
                          const Disturbance& d, double t1, const SimOptions& opts,
                          MonitorSpec monitor) {
    const int n = ctx.params().n;
    if (e0.size() != n + 1) throw std::invalid_argument("simulate_error: e0 dimension mismatch");
    const std::int64_t steps = step_count(0.0, t1, opts.step);
    Trajectory traj;
    traj.state_dim = n + 1;
    for (int i = 0; i <= n; ++i) traj.state_names.push_back("e_" + std::to_string(i));
    traj.meta = {0.0, opts.step, opts.stride, 0, std::nullopt};
    ErrorDynamics rhs(ctx, d, monitor);
    Eigen::VectorXd x = e0;
    integrate_loop(rhs, x, 0.0, steps, opts.step,
                   [&](std::int64_t k, double t, const Eigen::VectorXd& xx) {
                       if (k % opts.stride != 0 && k != steps) return;
                       traj.times.push_back(t);
                       traj.states.insert(traj.states.end(), xx.data(), xx.data() + xx.size());
                       traj.gains.push_back(ctx.kappa(t));
                   });
    traj.meta.switch_time = rhs.switch_time();
    return traj;
}

Trajectory simulate_differentiator(const RedesignContext& ctx, const Eigen::VectorXd& z0,
                                   const TestSignal& sig, const NoiseSpec& noise, double t1,
                                   const SimOptions& opts, MonitorSpec monitor) {
    const int n = ctx.params().n;
    if (z0.size() != n + 1)
        throw std::invalid_argument("simulate_differentiator: z0 dimension mismatch");
    const std::int64_t steps = step_count(0.0, t1, opts.step);
    Trajectory traj;
    traj.state_dim = n + 1;
    for (int i = 0; i <= n; ++i) traj.state_names.push_back("z_" + std::to_string(i));
    traj.deriv_count = n;
    traj.error_dim = n + 1;
    traj.meta = {0.0, opts.step, opts.stride, noise.seed, std::nullopt};
    NoiseStream stream(noise);
    DiffDynamics rhs(ctx, sig, stream, opts.stride, monitor);
    RichRecorder rec{&traj, opts.stride, steps, &ctx, &sig, &stream, 0};
    Eigen::VectorXd x = z0;
    integrate_loop(rhs, x, 0.0, steps, opts.step, rec);
    traj.meta.switch_time = rhs.switch_time();
    return traj;
}

Trajectory simulate_filtering(const RedesignContext& ctx, int n_f, int n_d,
                              const Eigen::VectorXd& x0, const TestSignal& sig,
                              const NoiseSpec& noise, double t1, const SimOptions& opts,
                              MonitorSpec monitor) {
    const int n = ctx.params().n;
    if (x0.size() != n + 1) throw std::invalid_argument("simulate_filtering: state dim mismatch");
    const std::int64_t steps = step_count(0.0, t1, opts.step);
    Trajectory traj;
    traj.state_dim = n + 1;
    for (int i = 1; i <= n_f; ++i) traj.state_names.push_back("w_" + std::to_string(i));
    for (int i = 0; i <= n_d; ++i) traj.state_names.push_back("z_" + std::to_string(i));
    traj.deriv_count = n_d;
    traj.error_dim = n + 1;
    traj.meta = {0.0, opts.step, opts.stride, noise.seed, std::nullopt};
    NoiseStream stream(noise);
    FilterDynamics rhs(ctx, n_f, n_d, sig, stream, opts.stride, monitor);
    RichRecorder rec{&traj, opts.stride, steps, &ctx, &sig, &stream, n_f};
    Eigen::VectorXd x = x0;
    integrate_loop(rhs, x, 0.0, steps, opts.step, rec);
    traj.meta.switch_time = rhs.switch_time();
    return traj;
}

Trajectory simulate_aux(const CorrectionFamily& family, const Eigen::VectorXd& chi0,
                        const std::function<double(double)>& pi, double tau1,
                        const SimOptions& opts) {
    const int n = family.order();
    if (chi0.size() != n + 1) throw std::invalid_argument("simulate_aux: chi0 dimension mismatch");
    const std::int64_t steps = step_count(0.0, tau1, opts.step);
    Trajectory traj;
    traj.state_dim = n + 1;
    for (int i = 0; i <= n; ++i) traj.state_names.push_back("chi_" + std::to_string(i));
    traj.meta = {0.0, opts.step, opts.stride, 0, std::nullopt};
    AuxDynamics rhs(family, pi);
    Eigen::VectorXd x = chi0;
    integrate_loop(rhs, x, 0.0, steps, opts.step, Recorder{&traj, opts.stride, steps});
    return traj;
}

}  // namespace ptdiff

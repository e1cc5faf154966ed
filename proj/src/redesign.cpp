#include "ptdiff/redesign.hpp"

#include <cmath>
#include <stdexcept>

namespace ptdiff {

double compute_eta(double alpha, double t_f) {
    if (alpha < 0.0) throw std::invalid_argument("compute_eta: alpha must be >= 0");
    if (!(t_f > 0.0)) throw std::invalid_argument("compute_eta: t_f must be > 0");
    if (std::isinf(t_f)) return 1.0;
    if (alpha == 0.0)
        throw std::invalid_argument("compute_eta: alpha = 0 is only valid with infinite t_f");
    return -std::expm1(-alpha * t_f);
}

double kappa_max(double alpha, double t_c, double t_f) {
    if (std::isinf(t_f))
        throw std::invalid_argument("kappa_max: unbounded gain, no bound exists for infinite t_f");
    if (!(t_c > 0.0)) throw std::invalid_argument("kappa_max: t_c must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("kappa_max: alpha must be >= 0");
    if (alpha == 0.0) return t_f / t_c;  // limit value
    return std::expm1(alpha * t_f) / (alpha * t_c);
}

double RedesignParams::beta_min() const {
    return std::pow(alpha * t_c / eta, double(n) + 1.0 - rho);
}

StructureMatrices build_structure(int n, double alpha, double rho) {
    if (n < 0) throw std::invalid_argument("build_structure: n must be >= 0");
    if (rho < 0.0 || rho > n + 1.0)
        throw std::invalid_argument("build_structure: rho must lie in [0, n+1]");
    const int m = n + 1;
    StructureMatrices s;
    s.U = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) s.U(i, i + 1) = 1.0;
    s.D_rho = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) s.D_rho(i, i) = double(i) - rho;

    const Eigen::MatrixXd A = s.U - alpha * s.D_rho;
    Eigen::VectorXd col = Eigen::VectorXd::Zero(m);
    col[m - 1] = 1.0;  // B_{n+1}

    s.Q_rho = Eigen::MatrixXd::Zero(m, m);
    s.Q_rho.col(m - 1) = col;
    for (int k = 1; k <= n; ++k) {
        col = A * col;
        s.Q_rho.col(m - 1 - k) = col;
    }
    s.M_power = A * col;  // (U - alpha D_rho)^{n+1} B_{n+1}
    return s;
}

RedesignContext RedesignContext::make(RedesignParams p, CorrectionFamily family) {
    if (p.n < 0) throw std::invalid_argument("RedesignContext: n must be >= 0");
    if (family.order() != p.n)
        throw std::invalid_argument("RedesignContext: family order does not match n");
    if (!(p.t_c > 0.0)) throw std::invalid_argument("RedesignContext: t_c must be > 0");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("RedesignContext: alpha must be > 0");
    if (!family.admits_alpha(p.alpha))
        throw std::invalid_argument("RedesignContext: alpha outside the family's validity interval");
    if (p.rho < 0.0 || p.rho > p.n + 1.0)
        throw std::invalid_argument("RedesignContext: rho must lie in [0, n+1]");
    if (p.L < 0.0) throw std::invalid_argument("RedesignContext: L must be >= 0");

    p.t_f = family.settling_bound();
    p.eta = compute_eta(p.alpha, p.t_f);

    const double bmin = p.beta_min();
    if (p.beta <= 0.0) p.beta = 2.0 * bmin;
    if (p.beta < bmin * (1.0 - 1e-12))
        throw std::invalid_argument("RedesignContext: beta below the admissible lower bound");

    if (p.mu <= 0.0) p.mu = RedesignParams::default_mu(p.L);

    if (p.terminal_gains.empty()) {
        switch (p.n) {
            case 0: p.terminal_gains = {1.1}; break;
            case 1: p.terminal_gains = {1.5, 1.1}; break;
            case 2: p.terminal_gains = {2.0, 2.12, 1.1}; break;
            default:
                throw std::invalid_argument(
                    "RedesignContext: no default terminal gains for n > 2; pass them explicitly");
        }
    }
    if (static_cast<int>(p.terminal_gains.size()) != p.n + 1)
        throw std::invalid_argument("RedesignContext: need n+1 terminal gains");
    for (double l : p.terminal_gains)
        if (!(l > 0.0)) throw std::invalid_argument("RedesignContext: terminal gains must be > 0");

    RedesignContext ctx;
    ctx.S_ = build_structure(p.n, p.alpha, p.rho);
    ctx.kappa_max_ = std::isinf(p.t_f) ? kInf : kappa_max(p.alpha, p.t_c, p.t_f);
    ctx.p_ = std::move(p);
    ctx.phi_ = std::move(family);
    return ctx;
}

double RedesignContext::kappa(double t) const {
    if (t >= p_.t_c) return 1.0;
    const double denom = p_.t_c - p_.eta * t;
    if (denom <= 0.0) {
        // Reachable only through floating-point overshoot of the pole; the
        // switch itself is grid-aligned at the first instant >= t_c.
        return std::isfinite(kappa_max_) ? kappa_max_
                                         : p_.eta / (p_.alpha * p_.t_c * 1e-16);
    }
    const double k = p_.eta / (p_.alpha * denom);
    return std::isfinite(kappa_max_) ? std::min(k, kappa_max_) : k;
}

std::optional<double> RedesignContext::kappa_bound() const {
    if (std::isinf(p_.t_f)) return std::nullopt;
    return kappa_max_;
}

void RedesignContext::f_vec(double e0, double t, Eigen::VectorXd& out) const {
    const int m = p_.n + 1;
    const double kr = (p_.rho == 0.0) ? 1.0 : std::pow(kappa(t), p_.rho);
    const double w = (kr * e0) / p_.beta;
    out.resize(m);
    for (int i = 0; i < m; ++i) out[i] = phi_.phi(i, w);
    out = p_.beta * (S_.Q_rho * out) + (kr * e0) * S_.M_power;
}

Eigen::VectorXd RedesignContext::f_vec(double e0, double t) const {
    Eigen::VectorXd out;
    f_vec(e0, t, out);
    return out;
}

double RedesignContext::g_terminal(int i, double e0) const {
    const double base = std::max(p_.L, p_.mu);
    const double ex_gain = double(i + 1) / double(p_.n + 1);
    const double ex_err = double(p_.n - i) / double(p_.n + 1);
    return p_.terminal_gains[i] * std::pow(base, ex_gain) * signed_power(e0, ex_err);
}

void RedesignContext::g_vec(double e0, Eigen::VectorXd& out) const {
    out.resize(p_.n + 1);
    for (int i = 0; i <= p_.n; ++i) out[i] = g_terminal(i, e0);
}

double RedesignContext::h_correction(int i, double e0, double t, bool terminal) const {
    if (terminal || t >= p_.t_c) return g_terminal(i, e0);
    Eigen::VectorXd f;
    f_vec(e0, t, f);
    return std::pow(kappa(t), 1.0 + double(i) - p_.rho) * f[i];
}

void RedesignContext::h_vec(double e0, double t, Eigen::VectorXd& out, bool terminal) const {
    if (terminal || t >= p_.t_c) {
        g_vec(e0, out);
        return;
    }
    f_vec(e0, t, out);
    const double k = kappa(t);
    double kp = std::pow(k, 1.0 - p_.rho);  // row 0 exponent
    for (int i = 0; i <= p_.n; ++i) {
        out[i] *= kp;
        kp *= k;
    }
}

}  // namespace ptdiff

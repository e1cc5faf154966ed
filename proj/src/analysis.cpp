#include "ptdiff/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ptdiff/parallel.hpp"

namespace ptdiff {

double time_warp(double t, const RedesignParams& p) {
    const double arg = 1.0 - p.eta * t / p.t_c;
    if (t < 0.0 || arg <= 0.0)
        throw std::invalid_argument("time_warp: t outside [0, t_c/eta)");
    return -std::log(arg) / p.alpha;
}

double inverse_warp(double tau, const RedesignParams& p) {
    if (tau < 0.0) throw std::invalid_argument("inverse_warp: tau must be >= 0");
    return p.t_c / p.eta * (-std::expm1(-p.alpha * tau));
}

Eigen::VectorXd lambda_diag(const RedesignContext& ctx, double t) {
    const auto& p = ctx.params();
    const double k = ctx.kappa(t);
    Eigen::VectorXd d(p.n + 1);
    for (int i = 0; i <= p.n; ++i) d[i] = std::pow(k, double(i) - p.rho);
    return d;
}

Eigen::VectorXd unit_lower_solve(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b) {
    const auto m = Q.rows();
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double s = b[i];
        for (Eigen::Index j = 0; j < i; ++j) s -= Q(i, j) * x[j];
        x[i] = s;  // unit diagonal
    }
    return x;
}

SettlingReport detect_settling(const Trajectory& traj, double tol, double dwell) {
    SettlingReport rep;
    rep.tol = tol;
    rep.dwell = dwell;
    const std::size_t m = traj.size();
    if (m == 0) return rep;

    // Earliest index a such that the whole window [t_a, t_a + dwell] stays
    // within tolerance and fits inside the record.
    std::size_t cand = 0;  // first index after the last violation
    for (std::size_t k = 0; k < m; ++k) {
        if (traj.residual_inf_norm(k) > tol) {
            cand = k + 1;
            continue;
        }
        if (cand <= k && traj.times[k] - traj.times[cand] >= dwell) {
            rep.converged = true;
            rep.detected_T = traj.times[cand];
            return rep;
        }
    }
    return rep;
}

double predicted_settling(double aux_T, const RedesignParams& p) {
    if (aux_T < 0.0) throw std::invalid_argument("predicted_settling: aux_T must be >= 0");
    return p.t_c / p.eta * (-std::expm1(-p.alpha * aux_T));
}

EquivalenceReport equivalence_check(const RedesignContext& ctx, const Eigen::VectorXd& e0,
                                    const Disturbance& d, double t_end, double step, double tol) {
    const auto& p = ctx.params();
    if (!(t_end < p.t_c))
        throw std::invalid_argument("equivalence_check: window must end before t_c");
    if (e0.size() != p.n + 1)
        throw std::invalid_argument("equivalence_check: e0 dimension mismatch");

    const std::int64_t K = std::llround(t_end / step);
    const auto& Q = ctx.structure().Q_rho;

    // chi(0) = beta^{-1} Q^{-1} Lambda(0)^{-1} e(0)
    Eigen::VectorXd lam0 = lambda_diag(ctx, 0.0);
    Eigen::VectorXd chi = unit_lower_solve(Q, e0.cwiseQuotient(lam0)) / p.beta;

    ErrorDynamics rhs(ctx, d);
    AuxDynamics aux(ctx.family(), [&](double tau) { return pi_of_tau(tau, p, d); });

    Eigen::VectorXd e = e0, de(p.n + 1), dchi(p.n + 1), e_pred(p.n + 1);
    double max_dev = 0.0, peak = e0.lpNorm<Eigen::Infinity>();
    double tau_prev = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
        const double t = step * double(k);
        // compare at the shared instant
        e_pred = p.beta * (lambda_diag(ctx, t).asDiagonal() * (Q * chi));
        max_dev = std::max(max_dev, (e - e_pred).lpNorm<Eigen::Infinity>());
        peak = std::max(peak, e.lpNorm<Eigen::Infinity>());
        if (!e.allFinite() || !e_pred.allFinite()) throw BlowupError(t);
        if (k == K) break;
        // advance both systems to the next shared instant
        rhs(k, t, e, de);
        e += step * de;
        const double tau_next = time_warp(step * double(k + 1), p);
        aux(k, tau_prev, chi, dchi);
        chi += (tau_next - tau_prev) * dchi;
        tau_prev = tau_next;
    }

    EquivalenceReport rep;
    rep.t_end = t_end;
    rep.tol = tol;
    rep.max_rel_dev = (peak > 0.0) ? max_dev / peak : 0.0;
    rep.passed = rep.max_rel_dev <= tol;
    return rep;
}

namespace {

Disturbance square_probe(double L, double period) {
    return [L, period](double t) {
        const double phase = std::fmod(t, period);
        return (phase < 0.5 * period) ? L : -L;
    };
}

}  // namespace

SweepReport slack_sweep(const SlackSweepConfig& cfg) {
    if (cfg.alphas.empty() || cfg.ic_scales.empty())
        throw std::invalid_argument("slack_sweep: grids must be nonempty");

    SweepReport rep;
    rep.alphas = cfg.alphas;
    rep.sampled_disturbances = cfg.probe_disturbance
                                   ? "d = 0 and d = +-L square wave (period 0.1 t_c)"
                                   : "d = 0";
    const std::size_t na = cfg.alphas.size();
    rep.kappa_max_per_alpha.resize(na);
    rep.aux_settling.resize(na);
    rep.measured_T_star.resize(na);
    rep.slack.resize(na);
    rep.sigma.resize(na);
    rep.direct_T_star.resize(na);

    parallel_for(na, cfg.workers, [&](std::size_t ai) {
        const double alpha = cfg.alphas[ai];
        auto family = CorrectionFamily::seeber(cfg.L, cfg.t_star);
        RedesignParams p;
        p.n = 1;
        p.alpha = alpha;
        p.t_c = cfg.t_c;
        p.L = cfg.L;
        auto ctx0 = RedesignContext::make(p, family);
        RedesignParams pp = ctx0.params();
        pp.beta = cfg.beta_factor * pp.beta_min();
        auto ctx = RedesignContext::make(pp, family);
        const auto& par = ctx.params();

        rep.kappa_max_per_alpha[ai] = kappa_max(alpha, par.t_c, par.t_f);

        std::vector<Disturbance> ds;
        ds.push_back(Disturbance{});
        if (cfg.probe_disturbance) ds.push_back(square_probe(cfg.L, 0.1 * par.t_c));

        double worst_aux = 0.0;
        bool all_converged = true;
        for (double s : cfg.ic_scales) {
            for (double sign : {1.0, -1.0}) {
                Eigen::VectorXd e0 = Eigen::VectorXd::Constant(2, sign * s);
                Eigen::VectorXd chi0 =
                    unit_lower_solve(ctx.structure().Q_rho,
                                     e0.cwiseQuotient(lambda_diag(ctx, 0.0))) /
                    par.beta;
                for (const auto& d : ds) {
                    auto pi = [&](double tau) { return d ? pi_of_tau(tau, par, d) : 0.0; };
                    // The base design settles at t_star at the latest; a short
                    // margin covers threshold and dwell effects.
                    const double tau_end = cfg.t_star + 3.0 * cfg.aux_dwell;
                    SimOptions aux_opts{cfg.aux_step, 10};
                    auto traj = simulate_aux(ctx.family(), chi0, pi, tau_end, aux_opts);
                    auto s_rep = detect_settling(traj, cfg.aux_tol, cfg.aux_dwell);
                    if (!s_rep.converged) {
                        all_converged = false;
                        continue;
                    }
                    worst_aux = std::max(worst_aux, s_rep.detected_T);
                }
            }
        }
        if (!all_converged) worst_aux = cfg.t_star;  // conservative fallback

        rep.aux_settling[ai] = worst_aux;
        rep.measured_T_star[ai] = predicted_settling(worst_aux, par);
        rep.slack[ai] = par.t_c - rep.measured_T_star[ai];
        rep.sigma[ai] = rep.slack[ai] / par.t_c;

        // Direct detection is meaningful only while the per-step kick of the
        // discontinuous terminal-row term stays below the threshold.
        const double km = rep.kappa_max_per_alpha[ai];
        const double kick = cfg.direct_step * km * km * 2.0 * cfg.L * par.beta;
        if (kick < 0.3 * cfg.direct_tol) {
            Eigen::VectorXd e0 = Eigen::VectorXd::Constant(2, cfg.ic_scales.back());
            SimOptions opts{cfg.direct_step, 100};
            auto traj = simulate_error(ctx, e0, Disturbance{}, 1.3 * par.t_c, opts);
            auto s_rep = detect_settling(traj, cfg.direct_tol, 0.1 * par.t_c);
            if (s_rep.converged) rep.direct_T_star[ai] = s_rep.detected_T;
        }
    });
    return rep;
}

void SweepReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "alpha,kappa_max,aux_settling,measured_T_star,slack,sigma,direct_T_star\n";
    char buf[256];
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,", alphas[i],
                      kappa_max_per_alpha[i], aux_settling[i], measured_T_star[i], slack[i],
                      sigma[i]);
        out << buf;
        if (direct_T_star[i]) {
            std::snprintf(buf, sizeof buf, "%.12g", *direct_T_star[i]);
            out << buf;
        }
        out << "\n";
    }
    out << "# sampled disturbances: " << sampled_disturbances << "\n";
}

std::string SweepReport::summary() const {
    std::ostringstream os;
    os << "slack sweep (" << sampled_disturbances << ")\n";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "  alpha=%-5g kappa_max=%-10.4g T*=%-10.6g slack=%-10.6g sigma=%.4g",
                      alphas[i], kappa_max_per_alpha[i], measured_T_star[i], slack[i], sigma[i]);
        os << buf;
        if (direct_T_star[i]) {
            std::snprintf(buf, sizeof buf, "  (direct T*=%.6g)", *direct_T_star[i]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

PerturbationReport perturbation_experiment(const RedesignContext& ctx,
                                           const std::vector<double>& fractions, double delta,
                                           double step, double settle_window) {
    const auto& p = ctx.params();
    if (p.n < 1)
        throw std::invalid_argument("perturbation_experiment: needs n >= 1 to show the effect");
    PerturbationReport rep;
    rep.fractions = fractions;
    rep.delta = delta;

    for (double frac : fractions) {
        if (!(frac > 0.0 && frac < 1.0))
            throw std::invalid_argument("perturbation_experiment: fractions must lie in (0,1)");
        const double t_p = frac * p.t_c;
        // With d = 0 the origin is an equilibrium of the discrete map, so the
        // pre-injection segment is identically zero and can be skipped.
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p.n + 1);
        e[0] = delta;
        ErrorDynamics rhs(ctx, Disturbance{});
        Eigen::VectorXd de(p.n + 1);
        const double t_end = p.t_c + settle_window * p.t_c;
        const auto steps = std::llround((t_end - t_p) / step);
        double peak = e.lpNorm<Eigen::Infinity>();
        for (std::int64_t k = 0; k < steps; ++k) {
            const double t = t_p + step * double(k);
            rhs(k, t, e, de);
            e += step * de;
            if (!e.allFinite()) throw BlowupError(t);
            peak = std::max(peak, e.lpNorm<Eigen::Infinity>());
        }
        rep.peaks.push_back(peak);
    }
    return rep;
}

std::string PerturbationReport::summary() const {
    std::ostringstream os;
    os << "perturbation peaks (delta = " << delta << ")\n";
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "  t_p = %-8g t_c : peak = %.6g\n", fractions[i], peaks[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace ptdiff

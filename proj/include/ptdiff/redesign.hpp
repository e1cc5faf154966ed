#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ptdiff/correction.hpp"

namespace ptdiff {

/// eta = 1 - exp(-alpha * t_f); exactly 1 for infinite t_f. Rejects negative
/// alpha and non-positive t_f, and alpha = 0 with finite t_f.
double compute_eta(double alpha, double t_f);

/// Supremum of the time-varying gain, (exp(alpha*t_f) - 1)/(alpha*t_c).
/// Requires finite t_f; the bound does not exist otherwise.
double kappa_max(double alpha, double t_c, double t_f);

/// All scalar design parameters of the gain-scheduled redesign.
struct RedesignParams {
    int n = 1;                  ///< differentiation order
    double alpha = 3.0;         ///< time-scale rate, must lie in the family's interval
    double t_c = 1.0;           ///< prescribed convergence deadline (> 0)
    double t_f = kInf;          ///< settling bound of the base design (finite or +inf)
    double eta = 1.0;           ///< 1 - exp(-alpha * t_f)
    double beta = 0.0;          ///< amplitude scale, >= beta_min
    double rho = 0.0;           ///< variant exponent in [0, n+1]
    double mu = 0.0;            ///< positive floor for L in the terminal gains;
                                ///< <= 0 selects the default 1e-3 max(1, L)
    double L = 0.0;             ///< bound on |y^{(n+1)}|
    std::vector<double> terminal_gains;  ///< l_0 .. l_n

    /// Lower bound (alpha*t_c/eta)^{n+1-rho} that beta must respect.
    double beta_min() const;

    /// Default mu scaling: 1e-3 * max(1, L).
    static double default_mu(double L) { return 1e-3 * std::max(1.0, L); }
};

/// Shift/diagonal/triangular matrices underlying the redesign.
struct StructureMatrices {
    Eigen::MatrixXd U;        ///< upper-shift, u_{ij} = 1 iff j = i+1
    Eigen::MatrixXd D_rho;    ///< diag(-rho, 1-rho, ..., n-rho)
    Eigen::MatrixXd Q_rho;    ///< columns (U - alpha D_rho)^k B_{n+1}, k = n..0
    Eigen::VectorXd M_power;  ///< (U - alpha D_rho)^{n+1} B_{n+1}
};

/// Builds U, D_rho, Q_rho and the (n+1)-st power column by repeated
/// matrix-vector products, which keeps Q_rho exactly unit lower-triangular.
StructureMatrices build_structure(int n, double alpha, double rho);

/// Immutable bundle of validated parameters, the base family and the
/// precomputed structure matrices. All evaluation on it is pure; instances
/// are safe to share between threads.
class RedesignContext {
public:
    /// Validates everything: beta bound, alpha in the family interval,
    /// matching orders, rho range, positive mu / t_c.
    /// Unset beta (<= 0) defaults to 2 * beta_min; unset mu to default_mu(L);
    /// empty terminal gains to the documented defaults (n <= 2).
    static RedesignContext make(RedesignParams p, CorrectionFamily family);

    const RedesignParams& params() const { return p_; }
    const CorrectionFamily& family() const { return phi_; }
    const StructureMatrices& structure() const { return S_; }

    /// Time-varying gain: eta/(alpha*(t_c - eta t)) before t_c, 1 after.
    /// For finite t_f the value is clamped at kappa_max against floating-point
    /// overshoot of the pole position.
    double kappa(double t) const;
    /// Gain bound; empty when t_f is infinite.
    std::optional<double> kappa_bound() const;

    /// f(e0, t) = beta Q_rho Phi(beta^{-1} kappa^rho e0) + kappa^rho M e0.
    /// Time-independent when rho = 0.
    void f_vec(double e0, double t, Eigen::VectorXd& out) const;
    Eigen::VectorXd f_vec(double e0, double t) const;

    /// Terminal correction l_i max(L,mu)^{(i+1)/(n+1)} |e0|^{(n-i)/(n+1)} sgn(e0).
    double g_terminal(int i, double e0) const;
    void g_vec(double e0, Eigen::VectorXd& out) const;

    /// Row i of the switched correction: kappa^{1+i-rho} f_i before the switch,
    /// g_i after. `terminal` forces the terminal branch (used by the optional
    /// convergence monitor, which may switch before t_c).
    double h_correction(int i, double e0, double t, bool terminal = false) const;
    /// All rows at once; cheaper than n+1 scalar calls.
    void h_vec(double e0, double t, Eigen::VectorXd& out, bool terminal = false) const;

private:
    RedesignParams p_;
    CorrectionFamily phi_;
    StructureMatrices S_;
    double kappa_max_ = kInf;
};

}  // namespace ptdiff

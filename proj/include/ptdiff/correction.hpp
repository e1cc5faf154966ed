#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ptdiff {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |x|^a * sign(x), with the a = 0 case reduced to sign(x) and sign(0) := 0.
double signed_power(double x, double a);

enum class FamilyKind {
    Linear,
    LevantHomogeneous,
    SeeberFirstOrder,
    MenardFixedTime,
};

std::string to_string(FamilyKind k);

/// Expand prod(s - lambda_i) into real coefficients (l_0 .. l_n) of
/// s^{n+1} + l_0 s^n + ... + l_n. All roots must have negative real part,
/// the largest real part must equal -(n+1), and complex roots must come in
/// conjugate pairs.
std::vector<double> linear_gains_from_roots(std::span<const std::complex<double>> roots);

/// Fixed settling bound (4/theta)*((1-c)^{-1} + (b-1)^{-1}) of the
/// MenardFixedTime family. Rejects theta < 1, c outside (0,1), b <= 1.
double menard_settling_bound(double theta, double c, double b);

/// One of the four admissible base correction-function families. Instances
/// are immutable; construction validates all per-family parameter rules.
class CorrectionFamily {
public:
    /// Default-constructed families are empty placeholders; use the factories.
    CorrectionFamily() = default;

    static CorrectionFamily linear(int n, std::vector<double> gains, double r);
    static CorrectionFamily linear_from_roots(std::span<const std::complex<double>> roots, double r);
    /// Levant-style homogeneous gains. Without explicit gains, documented
    /// defaults exist for n <= 2; larger orders require a gain list.
    static CorrectionFamily levant(int n, double L, std::vector<double> gains = {});
    /// First-order design with a least settling bound t_star; only n = 1.
    static CorrectionFamily seeber(double L, double t_star);
    /// Fixed-time design for the L = 0 signal class. Without explicit gains,
    /// defaults to the Hurwitz coefficients of (s + (n+1))^{n+1}.
    static CorrectionFamily menard(int n, double theta, double c, double b,
                                   std::vector<double> gains = {});

    FamilyKind kind() const { return kind_; }
    int order() const { return n_; }
    double settling_bound() const { return t_f_; }  ///< finite or +inf
    double derivative_bound() const { return L_; }

    /// Validity interval for the time-scale rate.
    double alpha_min() const { return 0.0; }
    double alpha_max() const { return alpha_max_; }  ///< exclusive; +inf if unbounded
    bool admits_alpha(double alpha) const { return alpha >= 0.0 && alpha < alpha_max_; }

    double phi(int i, double w) const;
    void phi_all(double w, Eigen::VectorXd& out) const;

    const std::vector<double>& gains() const { return gains_; }
    double linear_rate() const { return r_; }
    double seeber_k() const { return k_; }
    double menard_theta() const { return theta_; }
    double menard_c() const { return c_; }
    double menard_b() const { return b_; }

    /// Soft warnings collected at construction (e.g. Menard exponents far
    /// from the design boundary). Never fatal.
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    FamilyKind kind_ = FamilyKind::Linear;
    int n_ = 0;
    double t_f_ = kInf;
    double alpha_max_ = kInf;
    double L_ = 0.0;
    double r_ = 1.0;             // Linear
    double k_ = 0.0;             // Seeber
    double t_star_ = 0.0;        // Seeber
    double theta_ = 1.0, c_ = 1.0, b_ = 1.0;  // Menard
    std::vector<double> gains_;
    std::vector<std::string> warnings_;
};

}  // namespace ptdiff

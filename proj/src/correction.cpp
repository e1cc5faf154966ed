#include "ptdiff/correction.hpp"

#include <cmath>
#include <stdexcept>

namespace ptdiff {

double signed_power(double x, double a) {
    const double s = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    if (a == 0.0) return s;
    return std::pow(std::abs(x), a) * s;
}

std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::Linear: return "linear";
        case FamilyKind::LevantHomogeneous: return "levant";
        case FamilyKind::SeeberFirstOrder: return "seeber";
        case FamilyKind::MenardFixedTime: return "menard";
    }
    return "?";
}

std::vector<double> linear_gains_from_roots(std::span<const std::complex<double>> roots) {
    if (roots.empty()) throw std::invalid_argument("linear_gains_from_roots: empty root set");
    const int n = static_cast<int>(roots.size()) - 1;

    double max_re = -kInf;
    for (const auto& lam : roots) {
        if (!(lam.real() < 0.0))
            throw std::invalid_argument("linear_gains_from_roots: root with nonnegative real part");
        max_re = std::max(max_re, lam.real());
    }
    if (std::abs(max_re + double(n + 1)) > 1e-9 * (n + 1))
        throw std::invalid_argument(
            "linear_gains_from_roots: largest real part must equal -(n+1), got " +
            std::to_string(max_re));

    // Conjugate pairing: every root with nonzero imaginary part needs a partner.
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i] || std::abs(roots[i].imag()) < 1e-14) continue;
        bool found = false;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(roots[j].real() - roots[i].real()) < 1e-12 &&
                std::abs(roots[j].imag() + roots[i].imag()) < 1e-12) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("linear_gains_from_roots: complex root without conjugate");
    }

    // prod(s - lambda_i) by incremental convolution; a[k] = coefficient of s^k.
    std::vector<std::complex<double>> a{1.0};
    for (const auto& lam : roots) {
        a.push_back(0.0);
        for (std::size_t k = a.size() - 1; k >= 1; --k) a[k] = a[k - 1] - lam * a[k];
        a[0] = -lam * a[0];
    }

    // l_i is the coefficient of s^{n-i}.
    std::vector<double> gains(roots.size());
    for (int i = 0; i <= n; ++i) {
        const auto& c = a[n - i];
        if (std::abs(c.imag()) > 1e-9 * (1.0 + std::abs(c.real())))
            throw std::invalid_argument("linear_gains_from_roots: non-real coefficient");
        gains[i] = c.real();
    }
    return gains;
}

double menard_settling_bound(double theta, double c, double b) {
    if (theta < 1.0) throw std::invalid_argument("menard_settling_bound: theta must be >= 1");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("menard_settling_bound: c must be in (0,1)");
    if (!(b > 1.0)) throw std::invalid_argument("menard_settling_bound: b must be > 1");
    return (4.0 / theta) * (1.0 / (1.0 - c) + 1.0 / (b - 1.0));
}

namespace {

std::vector<double> default_levant_gains(int n) {
    switch (n) {
        case 0: return {1.1};
        case 1: return {1.5, 1.1};
        case 2: return {2.0, 2.12, 1.1};
        default:
            throw std::invalid_argument(
                "CorrectionFamily::levant: no documented default gains for n = " +
                std::to_string(n) + "; pass them explicitly");
    }
}

std::vector<double> hurwitz_all_at(int n) {
    // Coefficients of (s + (n+1))^{n+1}.
    std::vector<std::complex<double>> roots(n + 1, std::complex<double>(-(n + 1.0), 0.0));
    return linear_gains_from_roots(roots);
}

}  // namespace

CorrectionFamily CorrectionFamily::linear(int n, std::vector<double> gains, double r) {
    if (n < 0) throw std::invalid_argument("CorrectionFamily::linear: n must be >= 0");
    if (static_cast<int>(gains.size()) != n + 1)
        throw std::invalid_argument("CorrectionFamily::linear: need n+1 gains");
    if (!(r > 0.0)) throw std::invalid_argument("CorrectionFamily::linear: r must be > 0");
    CorrectionFamily f;
    f.kind_ = FamilyKind::Linear;
    f.n_ = n;
    f.gains_ = std::move(gains);
    f.r_ = r;
    f.t_f_ = kInf;
    f.alpha_max_ = r;
    f.L_ = 0.0;
    return f;
}

CorrectionFamily CorrectionFamily::linear_from_roots(std::span<const std::complex<double>> roots,
                                                     double r) {
    auto gains = linear_gains_from_roots(roots);
    return linear(static_cast<int>(roots.size()) - 1, std::move(gains), r);
}

CorrectionFamily CorrectionFamily::levant(int n, double L, std::vector<double> gains) {
    if (n < 0) throw std::invalid_argument("CorrectionFamily::levant: n must be >= 0");
    if (L < 0.0) throw std::invalid_argument("CorrectionFamily::levant: L must be >= 0");
    if (gains.empty()) gains = default_levant_gains(n);
    if (static_cast<int>(gains.size()) != n + 1)
        throw std::invalid_argument("CorrectionFamily::levant: need n+1 gains");
    CorrectionFamily f;
    f.kind_ = FamilyKind::LevantHomogeneous;
    f.n_ = n;
    f.gains_ = std::move(gains);
    f.L_ = L;
    f.t_f_ = kInf;
    f.alpha_max_ = kInf;
    return f;
}

CorrectionFamily CorrectionFamily::seeber(double L, double t_star) {
    if (!(L > 0.0)) throw std::invalid_argument("CorrectionFamily::seeber: L must be > 0");
    if (!(t_star > 0.0)) throw std::invalid_argument("CorrectionFamily::seeber: t_star must be > 0");
    CorrectionFamily f;
    f.kind_ = FamilyKind::SeeberFirstOrder;
    f.n_ = 1;  // this design only exists for first-order differentiation
    f.L_ = L;
    f.t_star_ = t_star;
    f.k_ = 9.8 / (std::sqrt(L) * t_star);
    f.t_f_ = t_star;
    f.alpha_max_ = kInf;
    return f;
}

CorrectionFamily CorrectionFamily::menard(int n, double theta, double c, double b,
                                          std::vector<double> gains) {
    const double t_f = menard_settling_bound(theta, c, b);  // validates theta, c, b
    if (n < 0) throw std::invalid_argument("CorrectionFamily::menard: n must be >= 0");
    if (gains.empty()) gains = hurwitz_all_at(n);
    if (static_cast<int>(gains.size()) != n + 1)
        throw std::invalid_argument("CorrectionFamily::menard: need n+1 gains");
    CorrectionFamily f;
    f.kind_ = FamilyKind::MenardFixedTime;
    f.n_ = n;
    f.gains_ = std::move(gains);
    f.theta_ = theta;
    f.c_ = c;
    f.b_ = b;
    f.L_ = 0.0;  // exactness of this family requires the L = 0 class
    f.t_f_ = t_f;
    f.alpha_max_ = kInf;
    if (1.0 - c > 0.2 || b - 1.0 > 0.2)
        f.warnings_.push_back("menard exponents far from 1 (1-c or b-1 exceeds 0.2); the "
                              "settling bound may be unreliable");
    return f;
}

double CorrectionFamily::phi(int i, double w) const {
    switch (kind_) {
        case FamilyKind::Linear:
            return std::pow(r_, i + 1) * gains_[i] * w;
        case FamilyKind::LevantHomogeneous: {
            const double ex = double(n_ - i) / double(n_ + 1);
            return gains_[i] * std::pow(L_, double(i + 1) / double(n_ + 1)) * signed_power(w, ex);
        }
        case FamilyKind::SeeberFirstOrder: {
            const double aw = std::abs(w);
            const double sq = std::sqrt(aw);
            const double s = (w > 0.0) ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
            if (i == 0) return 4.0 * std::sqrt(L_) * (sq * s + k_ * aw * sq * s);
            return 2.0 * L_ * (s + 4.0 * k_ * k_ * w + 3.0 * std::pow(k_, 4) * aw * w);
        }
        case FamilyKind::MenardFixedTime: {
            const double e1 = (i + 1) * c_ - i;
            const double e2 = (i + 1) * b_ + i;
            return std::pow(theta_, i + 1) * gains_[i] *
                   (signed_power(w, e1) + signed_power(w, e2));
        }
    }
    return 0.0;
}

void CorrectionFamily::phi_all(double w, Eigen::VectorXd& out) const {
    out.resize(n_ + 1);
    for (int i = 0; i <= n_; ++i) out[i] = phi(i, w);
}

}  // namespace ptdiff

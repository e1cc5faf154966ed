#pragma once

#include <Eigen/Dense>

#include "ptdiff/correction.hpp"
#include "ptdiff/dynamics.hpp"

namespace ptdiff {

struct AdmissibilityReport {
    double gamma_fit = 0.0;      ///< smallest envelope constant on the window
    double alpha_used = 0.0;
    double max_violation = 0.0;  ///< sup ||e(t)|| / (gamma exp(-alpha(n+1)t))
    bool passed = false;
};

struct AdmissibilityOptions {
    double horizon = 2.0;
    double step = 1e-5;
    double tol_env = 1e-9;       ///< relative slack on the violation ratio
    double probe_L = 1.0;        ///< disturbance magnitude scale
    bool probe_disturbance = true;
};

/// Empirical falsification of the exponential-envelope requirement: simulate
/// the base error dynamics under the decaying square-wave probe
/// d(t) = L exp(-alpha(n+1)t) * square(t), fit the smallest gamma with
/// ||e(t)|| <= gamma exp(-alpha(n+1)t) on the window, and report violations.
/// A run that blows up (or admits no finite gamma) fails; this is a
/// falsification attempt, not a proof.
AdmissibilityReport check_admissibility(const CorrectionFamily& family, double alpha,
                                        const Eigen::VectorXd& e0,
                                        const AdmissibilityOptions& opts = {});

}  // namespace ptdiff

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ptdiff/dynamics.hpp"
#include "ptdiff/redesign.hpp"
#include "ptdiff/signals.hpp"

namespace ptdiff {

struct FamilyConfig {
    std::string kind;  ///< linear | levant | seeber | menard
    // linear
    double r = 1.0;
    std::vector<std::array<double, 2>> roots;  ///< (re, im) pairs; alternative to gains
    // linear/levant/menard
    std::vector<double> gains;
    // seeber
    double t_star = 1.0;
    // menard
    double theta = 1.0, c = 0.9, b = 1.1;

    bool operator==(const FamilyConfig&) const = default;
};

struct FilteringConfig {
    int n_f = 1;
    int n_d = 0;
    bool operator==(const FilteringConfig&) const = default;
};

struct MonitorConfig {
    bool enabled = false;
    double tol = 1e-6;
    int dwell_samples = 100;
    bool operator==(const MonitorConfig&) const = default;
};

struct DifferentiatorConfig {
    int order = 1;
    double alpha = 3.0;
    double t_c = 1.0;
    std::optional<double> beta;   ///< absolute value; wins over beta_factor
    double beta_factor = 2.0;     ///< beta = factor * beta_min when beta unset
    double rho = 0.0;
    std::optional<double> mu;
    double L = 1.0;
    std::vector<double> terminal_gains;  ///< empty = documented defaults
    FamilyConfig family;
    std::optional<FilteringConfig> filtering;
    MonitorConfig monitor;

    bool operator==(const DifferentiatorConfig&) const = default;
};

struct SignalConfig {
    std::string preset;  ///< empty = explicit terms
    std::vector<SignalTerm> terms;

    bool operator==(const SignalConfig& o) const;
};

struct NoiseConfig {
    double std_dev = 0.0;
    std::uint64_t seed = 0;
    bool operator==(const NoiseConfig&) const = default;
};

struct IntegrationConfig {
    double step = 1e-5;
    double horizon = 2.0;
    int stride = 100;
    bool operator==(const IntegrationConfig&) const = default;
};

struct SettlingConfig {
    double tol = 1e-3;
    double dwell = 0.1;
    bool operator==(const SettlingConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    std::string stem = "run";
    bool operator==(const OutputConfig&) const = default;
};

/// Full description of one experiment run. Parsing is fail-fast: unknown
/// keys are errors, and all module-level invariants are validated before
/// anything executes.
struct ExperimentConfig {
    DifferentiatorConfig differentiator;
    SignalConfig signal;
    std::optional<NoiseConfig> noise;
    IntegrationConfig integration;
    std::vector<double> initial_state;  ///< empty = zeros
    SettlingConfig settling;
    OutputConfig output;

    bool operator==(const ExperimentConfig&) const = default;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;
    void save(const std::string& path) const;
};

/// Validated, ready-to-run objects built from a config.
struct ResolvedExperiment {
    RedesignContext ctx;
    TestSignal signal;
    NoiseSpec noise;
    std::optional<FilteringConfig> filtering;
    MonitorSpec monitor;
    SimOptions sim;
    double horizon;
    Eigen::VectorXd initial_state;
    SettlingConfig settling;
    std::vector<std::string> warnings;  ///< e.g. class-membership violations
};

/// Builds and validates everything; throws std::invalid_argument on any
/// violated invariant (bad beta, alpha outside the family interval,
/// mismatched orders, nonpositive horizon, ...).
ResolvedExperiment resolve(const ExperimentConfig& cfg);

}  // namespace ptdiff

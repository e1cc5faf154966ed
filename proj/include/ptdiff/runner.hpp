#pragma once

#include <string>
#include <vector>

#include "ptdiff/analysis.hpp"
#include "ptdiff/config.hpp"

namespace ptdiff {

/// Process exit contract shared by the CLI and the verification suites.
enum ExitCode : int {
    kOk = 0,
    kValidationError = 2,
    kBlowup = 3,
    kVerifyFailed = 4,
};

struct RunOverrides {
    std::optional<double> step;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

struct RunArtifacts {
    std::string dir;
    std::string trajectory_csv;
    std::string gains_csv;
    std::string settling_txt;
    std::string config_json;
    SettlingReport settling;
    std::vector<std::string> warnings;
};

/// Runs one configured simulation and writes trajectory CSV, gain CSV,
/// settling report and a resolved config snapshot into the output directory.
RunArtifacts run_simulation(const ExperimentConfig& cfg, const RunOverrides& ov = {});

/// Built-in benchmark scenarios fig1a, fig1b, fig1c, fig1d, fig2.
ExperimentConfig make_reproduce_config(const std::string& figure);

/// Instantiates a benchmark scenario, runs it, and writes a summary that
/// includes the gain bound and convergence statistics.
RunArtifacts run_reproduce(const std::string& figure, const RunOverrides& ov = {});

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Property suites behind `verify`. Each returns one line per check.
std::vector<CheckResult> verify_equivalence(int workers = 0);
std::vector<CheckResult> verify_admissibility();
std::vector<CheckResult> verify_slack(int workers = 0);
std::vector<CheckResult> verify_stability();
std::vector<CheckResult> run_verify_suite(const std::string& suite, int workers = 0);

/// Default slack-sweep configuration used by `sweep` and `verify slack`.
SlackSweepConfig default_slack_config();

/// Stability-demonstration configurations: a gain-bounded design and an
/// unbounded (linear-base) design, both first order.
RedesignContext stability_bounded_context();
RedesignContext stability_unbounded_context();

}  // namespace ptdiff

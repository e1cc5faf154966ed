#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ptdiff/runner.hpp"

using namespace ptdiff;

namespace {

int report_checks(const std::vector<CheckResult>& checks, const std::string& report_path) {
    int failed = 0;
    std::string text;
    for (const auto& c : checks) {
        char line[640];
        std::snprintf(line, sizeof line, "[%s] %s%s%s\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.detail.empty() ? "" : ": ", c.detail.c_str());
        std::fputs(line, stdout);
        text += line;
        if (!c.passed) ++failed;
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failed);
    if (!report_path.empty()) {
        std::filesystem::create_directories(std::filesystem::path(report_path).parent_path());
        std::ofstream out(report_path);
        out << text << checks.size() << " checks, " << failed << " failed\n";
        std::printf("wrote %s\n", report_path.c_str());
    }
    return failed ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"predefined-time exact differentiator simulation and verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, figure, suite = "all";
    double step = 0.0;
    std::uint64_t seed = 0;
    bool have_step = false, have_seed = false, have_out = false;
    int workers = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory")->each([&](const std::string&) {
            have_out = true;
        });
        cmd->add_option("--step", step, "integration step override")->each([&](const std::string&) {
            have_step = true;
        });
        cmd->add_option("--seed", seed, "noise seed override")->each([&](const std::string&) {
            have_seed = true;
        });
        cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    };

    auto* sim = app.add_subcommand("simulate", "run one configured simulation");
    sim->add_option("--config", config_path, "experiment config (JSON)")->required();
    add_common(sim);

    auto* rep = app.add_subcommand("reproduce", "run a bundled benchmark scenario");
    rep->add_option("figure", figure, "fig1a|fig1b|fig1c|fig1d|fig2")->required();
    add_common(rep);

    auto* swp = app.add_subcommand("sweep", "settling-slack sweep over the rate parameter");
    add_common(swp);

    auto* ver = app.add_subcommand("verify", "run a property suite");
    ver->add_option("suite", suite, "equivalence|admissibility|slack|stability|all");
    add_common(ver);

    CLI11_PARSE(app, argc, argv);

    RunOverrides ov;
    if (have_step) ov.step = step;
    if (have_seed) ov.seed = seed;
    if (have_out) ov.out_dir = out_dir;

    try {
        if (sim->parsed()) {
            auto cfg = ExperimentConfig::load(config_path);
            auto art = run_simulation(cfg, ov);
            std::printf("wrote %s\n", art.trajectory_csv.c_str());
            std::printf("settling: converged=%s detected_T=%.6g\n",
                        art.settling.converged ? "yes" : "no", art.settling.detected_T);
            for (const auto& w : art.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            return kOk;
        }
        if (rep->parsed()) {
            auto art = run_reproduce(figure, ov);
            std::printf("run directory: %s\n", art.dir.c_str());
            std::printf("settling: converged=%s detected_T=%.6g\n",
                        art.settling.converged ? "yes" : "no", art.settling.detected_T);
            for (const auto& w : art.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            return kOk;
        }
        if (swp->parsed()) {
            auto cfg = default_slack_config();
            cfg.workers = workers;
            auto report = slack_sweep(cfg);
            std::printf("%s", report.summary().c_str());
            const std::string dir = have_out ? out_dir : "out_sweep";
            std::filesystem::create_directories(dir);
            report.write_csv(dir + "/slack_sweep.csv");
            std::printf("wrote %s/slack_sweep.csv\n", dir.c_str());
            return kOk;
        }
        if (ver->parsed()) {
            const std::string dir = have_out ? out_dir : "out_verify";
            return report_checks(run_verify_suite(suite, workers), dir + "/" + suite + ".txt");
        }
    } catch (const BlowupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kBlowup;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kOk;
}

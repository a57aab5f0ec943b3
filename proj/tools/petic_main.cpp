// Command-line front end: scenario validation, stability-certificate
// verification, single trajectories, Monte Carlo ensembles and fixed-period
// baseline comparisons. Exit codes: 0 success, 1 infeasible certificate,
// 2 validation error, 3 runtime blowup.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "petic/analysis.hpp"
#include "petic/csv.hpp"
#include "petic/errors.hpp"
#include "petic/scenario.hpp"
#include "petic/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBlowup = 3;

json report_to_json(const petic::CertificateReport& r) {
    json out;
    out["mode"] = r.delayed ? "delayed" : "no_delay";
    out["lambda"] = r.lambda;
    out[r.delayed ? "lambda1_tilde" : "lambda1"] = r.lambda1;
    out["gamma_bar"] = r.gamma_bar;
    out["M"] = r.M;
    out["feasible"] = r.feasible;
    out["gamma"] = r.gamma_used;
    out["gamma_certified"] = r.gamma_certified;
    if (r.delayed)
        out["beta"] = r.beta_max;
    else
        out["tau_floor"] = r.tau_floor;
    out["assumptions"] = json::array();
    for (const auto& a : r.assumptions) {
        out["assumptions"].push_back(
            {{"name", a.name}, {"passed", a.passed}, {"residual", a.residual}, {"detail", a.detail}});
    }
    return out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

int cmd_verify(const std::string& scenario_path, bool strict, const std::string& out_dir) {
    petic::Scenario scenario = petic::load_scenario(scenario_path);
    petic::CertificateReport report = petic::verify_scenario(scenario);

    std::printf("scenario: %s (mode %s, dim %d)\n", scenario_path.c_str(),
                petic::to_string(scenario.mode).c_str(), scenario.dim());
    std::printf("lambda      = %.6f\n", report.lambda);
    std::printf("%-11s = %.6f\n", report.delayed ? "lambda1~" : "lambda1", report.lambda1);
    std::printf("gamma_bar   = %.6f\n", report.gamma_bar);
    std::printf("M           = %.6f\n", report.M);
    std::printf("feasible    = %s\n", report.feasible ? "yes" : "no");
    std::printf("gamma       = %g (%s)\n", report.gamma_used,
                report.gamma_certified ? "certified, gamma <= gamma_bar" : "NOT certified");
    for (const auto& a : report.assumptions)
        std::printf("  [%s] %-24s residual %.6g  %s\n", a.passed ? "pass" : "FAIL",
                    a.name.c_str(), a.residual, a.detail.c_str());

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "report.json", report_to_json(report));
    }

    if (!report.matching_ok) {
        std::printf("warning: Assumption 2 matching residuals exceed tolerance%s\n",
                    strict ? " (strict mode: failing)" : "");
        if (strict) return kExitValidation;
    }
    if (scenario.mode != petic::ControlMode::Uncontrolled && !report.feasible)
        return kExitInfeasible;
    return kExitOk;
}

int cmd_run(const std::string& scenario_path, uint64_t seed, bool seed_given,
            const std::string& out_dir, bool gnuplot) {
    petic::Scenario scenario = petic::load_scenario(scenario_path);
    const uint64_t run_seed =
        seed_given ? seed : petic::derive_run_seed(scenario.sim.master_seed, 0);
    petic::Trajectory traj = petic::run_trajectory(scenario, run_seed);

    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);
    petic::write_trajectory_csv((dir / "trajectory.csv").string(), traj);
    petic::write_events_csv((dir / "events.csv").string(), traj.events);
    if (gnuplot)
        petic::write_trajectory_gnuplot((dir / "trajectory.gp").string(), "trajectory.csv",
                                        scenario.dim());

    const long long baseline =
        static_cast<long long>(scenario.sim.horizon / scenario.trigger.delta + 1e-9);
    const double reduction =
        baseline > 0 ? 1.0 - static_cast<double>(traj.events.count()) / baseline : 0.0;
    std::printf("events = %d, min gap = %g, baseline = %lld, reduction = %.1f%%\n",
                traj.events.count(), traj.events.empty() ? 0.0 : traj.events.min_gap(), baseline,
                100.0 * reduction);
    if (traj.blew_up) {
        std::printf("RUN DIVERGED: %s\n", traj.diagnostics.c_str());
        return kExitBlowup;
    }
    std::printf("final |y|^2 = %.6g\n", traj.norm_sq.back());
    return kExitOk;
}

int cmd_ensemble(const std::string& scenario_path, int runs_override, const std::string& out_dir,
                 bool gnuplot) {
    petic::Scenario scenario = petic::load_scenario(scenario_path);
    petic::SimParams sim = scenario.sim;
    if (runs_override > 0) sim.n_runs = runs_override;

    petic::CertificateReport report = petic::verify_scenario(scenario);
    petic::EnsembleStats stats = petic::run_ensemble(scenario, sim);
    petic::DecayVerdict decay = petic::decay_check(stats, scenario.trigger.gamma, report.M);

    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);
    petic::write_ensemble_csv((dir / "ensemble.csv").string(), stats, scenario.trigger.gamma,
                              report.M);
    if (gnuplot) petic::write_ensemble_gnuplot((dir / "ensemble.gp").string(), "ensemble.csv");

    json summary;
    summary["runs"] = sim.n_runs;
    summary["excluded"] = stats.excluded;
    summary["decay_passed"] = decay.passed;
    summary["decay_margin"] = decay.margin;
    summary["ls_exponent"] = decay.ls_exponent;
    if (!stats.logs.empty()) {
        petic::TriggerStats ts =
            petic::trigger_report(stats.logs, scenario.trigger.delta, sim.horizon);
        summary["mean_events"] = ts.mean_count;
        summary["baseline"] = ts.baseline;
        summary["reduction"] = ts.reduction;
        std::printf("mean events = %.1f over %lld baseline (reduction %.1f%%), min gap = %g\n",
                    ts.mean_count, ts.baseline, 100.0 * ts.reduction, stats.min_gap);
    }
    summary["certificate"] = report_to_json(report);
    write_json(dir / "ensemble_summary.json", summary);

    std::printf("decay bound (%g * M e^-gamma t): %s (margin %.3g)\n", 1.5, // default slack
                decay.passed ? "PASS" : "FAIL", decay.margin);
    std::printf("excluded runs: %d of %d\n", stats.excluded, sim.n_runs);
    return kExitOk;
}

int cmd_baseline(const std::string& scenario_path, uint64_t seed, bool seed_given,
                 const std::string& out_dir) {
    petic::Scenario scenario = petic::load_scenario(scenario_path);
    const uint64_t run_seed =
        seed_given ? seed : petic::derive_run_seed(scenario.sim.master_seed, 0);

    petic::Trajectory periodic = petic::run_fixed_period(scenario, run_seed);
    petic::Trajectory triggered = petic::run_trajectory(scenario, run_seed);

    std::printf("fixed-period updates = %d%s\n", periodic.events.count(),
                periodic.blew_up ? " (diverged)" : "");
    std::printf("event-triggered updates = %d%s\n", triggered.events.count(),
                triggered.blew_up ? " (diverged)" : "");
    if (periodic.events.count() > 0) {
        const double reduction =
            1.0 - static_cast<double>(triggered.events.count()) / periodic.events.count();
        std::printf("reduction = %.1f%%\n", 100.0 * reduction);
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        petic::write_events_csv((fs::path(out_dir) / "baseline_events.csv").string(),
                                periodic.events);
        petic::write_events_csv((fs::path(out_dir) / "events.csv").string(), triggered.events);
    }
    return (periodic.blew_up || triggered.blew_up) ? kExitBlowup : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic event-triggered impulsive consensus simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    bool strict = false;
    bool gnuplot = false;
    uint64_t seed = 0;
    int runs = 0;

    auto* verify = app.add_subcommand("verify", "check stability certificate and assumptions");
    verify->add_option("scenario", scenario_path, "scenario file")->required();
    verify->add_flag("--strict", strict, "fail on Assumption-2 matching residuals");
    verify->add_option("--out", out_dir, "directory for report.json");

    auto* run = app.add_subcommand("run", "simulate one sample path");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "run seed (default: derived from scenario)");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--gnuplot", gnuplot, "emit companion plot scripts");

    auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble with decay check");
    ensemble->add_option("scenario", scenario_path, "scenario file")->required();
    ensemble->add_option("--runs", runs, "override ensemble size");
    ensemble->add_option("--out", out_dir, "output directory");
    ensemble->add_flag("--gnuplot", gnuplot, "emit companion plot scripts");

    auto* baseline = app.add_subcommand("baseline", "compare against fixed-period control");
    baseline->add_option("scenario", scenario_path, "scenario file")->required();
    auto* bseed_opt = baseline->add_option("--seed", seed, "run seed");
    baseline->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(scenario_path, strict, out_dir);
        if (run->parsed())
            return cmd_run(scenario_path, seed, seed_opt->count() > 0, out_dir, gnuplot);
        if (ensemble->parsed()) return cmd_ensemble(scenario_path, runs, out_dir, gnuplot);
        if (baseline->parsed())
            return cmd_baseline(scenario_path, seed, bseed_opt->count() > 0, out_dir);
    } catch (const petic::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const petic::BlowupError& e) {
        std::cerr << "runtime blowup: " << e.what() << "\n";
        return kExitBlowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

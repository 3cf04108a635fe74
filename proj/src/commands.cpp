#include "pwlstl/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "pwlstl/bench.hpp"
#include "pwlstl/encoder.hpp"
#include "pwlstl/mission.hpp"
#include "pwlstl/solver.hpp"
#include "pwlstl/svg_plot.hpp"

namespace pwlstl {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw MissionError("cannot write '" + path + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissionError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int parse_with(CLI::App& app, const std::vector<std::string>& args, std::ostream& err) {
    // CLI11 consumes argv back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return -1;
        }
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return 0;
}

nlohmann::json stats_json(const EncodingArtifacts& artifacts) {
    nlohmann::json j;
    j["num_binary"] = artifacts.num_binary;
    j["num_continuous"] = artifacts.num_continuous;
    j["num_constraints"] = artifacts.num_constraints;
    j["reduced_path"] = artifacts.reduced_path;
    return j;
}

struct SynthOutcome {
    int exit_code = kExitOk;
    bool solved = false;
    MilpSolution solution;
    EncodingArtifacts artifacts;
    PwlTrajectory trajectory{std::vector<Waypoint>{{0.0, {0.0}}, {1.0, {0.0}}}};
};

// Encode+solve+verify one mission at its configured K. Verification re-runs
// the monitor on the extracted waypoints and refuses success unless the
// robustness clears theta_star.
SynthOutcome synthesize(const Mission& mission, const std::string& solver,
                        const std::string& solution_path, double time_limit, int max_binaries,
                        std::ostream& err) {
    SynthOutcome outcome;
    SynthesisProblem prob = mission.to_problem();
    auto [model, artifacts] = encode_mission(prob);
    outcome.artifacts = artifacts;

    MilpSolution sol;
    if (solver == "builtin") {
        if (artifacts.num_binary > max_binaries) {
            err << "error: model has " << artifacts.num_binary
                << " binaries, above the built-in cap " << max_binaries
                << " (use --max-binaries or the export path)\n";
            outcome.exit_code = kExitBadInput;
            return outcome;
        }
        SolverConfig cfg;
        cfg.time_limit = time_limit;
        sol = solve(model, cfg);
    } else {
        sol = import_solution(model, read_file(solution_path));
        for (const auto& warning : sol.warnings) err << "warning: " << warning << "\n";
        if (model.max_violation(sol.values) > 1e-6) {
            err << "error: imported assignment violates the model by "
                << model.max_violation(sol.values) << "\n";
            outcome.exit_code = kExitVerifyMismatch;
            return outcome;
        }
    }

    if (sol.status == SolveStatus::Infeasible) {
        outcome.exit_code = kExitInfeasible;
        return outcome;
    }
    if (sol.status == SolveStatus::TimedOut ||
        (solver == "builtin" && sol.status == SolveStatus::Feasible)) {
        // An incumbent without an optimality proof still hits the limit
        // contract.
        outcome.exit_code = kExitSolverLimit;
        return outcome;
    }

    outcome.trajectory = extract_trajectory(prob, artifacts, sol.values);
    FormulaIndex index(mission.formula);
    auto theta = eval_time_robustness(index, outcome.trajectory, mission.regions,
                                      mission.workspace.epsilon, mission.side);
    auto sat = eval_qualitative(index, outcome.trajectory, mission.regions,
                                mission.workspace.epsilon);
    const Robustness verified = theta.at(0, 0);
    const bool theta_ok =
        verified.is_pos_infinity() ||
        (verified.is_finite() && verified.seconds() >= mission.theta_star - 1e-6);
    if (!theta_ok || !sat.at(0, 0)) {
        err << "error: monitor re-verification failed (theta " << verified.str() << ", sat "
            << (sat.at(0, 0) ? "true" : "false") << ")\n";
        outcome.exit_code = kExitVerifyMismatch;
        return outcome;
    }
    outcome.solved = true;
    outcome.solution = std::move(sol);
    return outcome;
}

}  // namespace

int run_monitor(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"evaluate a trajectory against a mission"};
    std::string mission_path, traj_path, report_path;
    bool full = false;
    app.add_option("mission", mission_path, "mission JSON")->required();
    app.add_option("trajectory", traj_path, "trajectory JSON")->required();
    app.add_flag("--full", full, "per-segment matrices in the report");
    app.add_option("--out", report_path, "also write the report to a file");
    if (int rc = parse_with(app, args, err)) return rc < 0 ? kExitOk : rc;

    try {
        Mission mission = load_mission(mission_path);
        PwlTrajectory traj = load_trajectory(traj_path);
        std::string report = monitor_report_json(mission, traj, full);
        out << report;
        if (!report_path.empty()) write_file(report_path, report);
        return monitor_verdict(mission, traj) ? kExitOk : kExitViolated;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int run_encode(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"encode a mission and export the model"};
    std::string mission_path, lp_path, stats_path;
    app.add_option("mission", mission_path, "mission JSON")->required();
    app.add_option("--out", lp_path, "LP file path")->required();
    app.add_option("--stats", stats_path, "also write the stats JSON to a file");
    if (int rc = parse_with(app, args, err)) return rc < 0 ? kExitOk : rc;

    try {
        Mission mission = load_mission(mission_path);
        auto [model, artifacts] = encode_mission(mission.to_problem());
        write_file(lp_path, export_lp(model));
        std::string stats = stats_json(artifacts).dump(2) + "\n";
        out << stats;
        if (!stats_path.empty()) write_file(stats_path, stats);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int run_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"synthesize a trajectory for a mission"};
    std::string mission_path, traj_path, solver = "builtin", solution_path, report_path;
    double time_limit = 60.0;
    int max_binaries = 400;
    int auto_k = 0;
    app.add_option("mission", mission_path, "mission JSON")->required();
    app.add_option("--out", traj_path, "trajectory JSON output")->required();
    app.add_option("--solver", solver, "builtin|external")
        ->check(CLI::IsMember({"builtin", "external"}));
    app.add_option("--solution", solution_path, "external solver assignment (name value lines)");
    app.add_option("--time-limit", time_limit, "built-in solver budget, seconds");
    app.add_option("--max-binaries", max_binaries, "built-in solver size cap");
    app.add_option("--auto-k", auto_k, "increase K up to this bound until feasible");
    app.add_option("--report", report_path, "write the monitor report here");
    if (int rc = parse_with(app, args, err)) return rc < 0 ? kExitOk : rc;

    if (solver == "external" && solution_path.empty()) {
        err << "error: --solver external needs --solution\n";
        return kExitBadInput;
    }

    try {
        Mission mission = load_mission(mission_path);
        const int k_low = mission.num_waypoints;
        const int k_high = auto_k > 0 ? std::max(auto_k, k_low) : k_low;
        SynthOutcome outcome;
        for (int k = k_low; k <= k_high; ++k) {
            mission.num_waypoints = k;
            outcome = synthesize(mission, solver, solution_path, time_limit, max_binaries, err);
            if (outcome.exit_code != kExitInfeasible || k == k_high) break;
            err << "note: infeasible at K=" << k << ", retrying with K=" << k + 1 << "\n";
        }
        if (!outcome.solved) return outcome.exit_code;

        write_file(traj_path, trajectory_json(outcome.trajectory));
        nlohmann::json j;
        j["mission"] = mission.name;
        j["status"] = "optimal";
        j["K"] = mission.num_waypoints;
        j["objective"] = outcome.solution.objective;
        j["theta"] =
            outcome.solution.values[static_cast<std::size_t>(outcome.artifacts.root_theta)];
        j["stats"] = stats_json(outcome.artifacts);
        out << j.dump(2) << "\n";
        if (!report_path.empty())
            write_file(report_path, monitor_report_json(mission, outcome.trajectory, true));
        return kExitOk;
    } catch (const InfeasibleEndpoints& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int run_plot(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"render a mission and trajectory as SVG"};
    std::string mission_path, traj_path, svg_path;
    app.add_option("mission", mission_path, "mission JSON")->required();
    app.add_option("trajectory", traj_path, "trajectory JSON")->required();
    app.add_option("--out", svg_path, "SVG output path")->required();
    if (int rc = parse_with(app, args, err)) return rc < 0 ? kExitOk : rc;

    try {
        Mission mission = load_mission(mission_path);
        PwlTrajectory traj = load_trajectory(traj_path);
        write_file(svg_path, render_svg(mission, traj));
        out << "wrote " << svg_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"run the bundled benchmark missions"};
    std::string scale = "desk", json_path;
    bool timing = false;
    app.add_option("--scale", scale, "desk|paper")->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--json", json_path, "write a JSON report");
    app.add_flag("--timing", timing, "include wall-clock seconds in the output");
    if (int rc = parse_with(app, args, err)) return rc < 0 ? kExitOk : rc;

    nlohmann::json report = nlohmann::json::array();
    bool all_ok = true;
    try {
        for (auto& bench : load_benchmarks()) {
            if ((scale == "desk") != (bench.scale == BenchScale::Desk)) continue;
            nlohmann::json entry;
            entry["name"] = bench.mission.name;
            if (bench.scale == BenchScale::Paper) {
                auto [model, artifacts] = encode_mission(bench.mission.to_problem());
                (void)model;
                entry["stats"] = stats_json(artifacts);
                out << "EXPORT " << bench.mission.name << " binaries=" << artifacts.num_binary
                    << " continuous=" << artifacts.num_continuous
                    << " constraints=" << artifacts.num_constraints << "\n";
            } else {
                auto begin = std::chrono::steady_clock::now();
                SynthOutcome outcome =
                    synthesize(bench.mission, "builtin", "", bench.time_budget, 1 << 20, err);
                double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
                        .count();
                double theta =
                    outcome.solved
                        ? outcome.solution
                              .values[static_cast<std::size_t>(outcome.artifacts.root_theta)]
                        : 0.0;
                bool ok = outcome.solved == bench.expect_feasible &&
                          (!outcome.solved || theta >= bench.theta_min - 1e-6);
                all_ok = all_ok && ok;
                entry["solved"] = outcome.solved;
                entry["theta"] = theta;
                entry["pass"] = ok;
                out << (ok ? "PASS " : "FAIL ") << bench.mission.name;
                if (outcome.solved) out << " theta=" << format_number(theta);
                if (timing) out << " time=" << format_number(elapsed) << "s";
                out << "\n";
            }
            report.push_back(entry);
        }
        if (!json_path.empty()) write_file(json_path, report.dump(2) + "\n");
        return all_ok ? kExitOk : kExitViolated;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << "usage: pwlstl <monitor|encode|synth|plot|bench> [options]\n"
                  << "  monitor  evaluate a trajectory against a mission\n"
                  << "  encode   export a mission's model as an LP file\n"
                  << "  synth    synthesize a trajectory\n"
                  << "  plot     render mission and trajectory as SVG\n"
                  << "  bench    run the bundled benchmark missions\n";
        return kExitBadInput;
    }
    std::string command = args.front();
    std::vector<std::string> rest(args.begin() + 1, args.end());
    if (command == "monitor") return run_monitor(rest, std::cout, std::cerr);
    if (command == "encode") return run_encode(rest, std::cout, std::cerr);
    if (command == "synth") return run_synth(rest, std::cout, std::cerr);
    if (command == "plot") return run_plot(rest, std::cout, std::cerr);
    if (command == "bench") return run_bench(rest, std::cout, std::cerr);
    std::cerr << "error: unknown command '" << command << "'\n";
    return kExitBadInput;
}

}  // namespace pwlstl

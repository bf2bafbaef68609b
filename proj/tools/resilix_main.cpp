#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resilix/io.hpp"
#include "resilix/lp_io.hpp"
#include "resilix/mem.hpp"
#include "resilix/oracle.hpp"
#include "resilix/rop.hpp"

namespace {

using namespace resilix;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitUsage = 64;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::HorizonMismatch:
        case ErrorCode::RangeViolation:
        case ErrorCode::SeedRequired:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::ParseError:
        case ErrorCode::UnknownCaseLabel:
        case ErrorCode::SizeLimitExceeded:
        case ErrorCode::NoCapacityReference:
            return kExitValidation;
        default:
            return kExitSolver;
    }
}

struct CommonArgs {
    std::string spec_path;
    std::string event_path;
    std::string profiles_csv;
    long count = 1000;
    std::optional<uint64_t> seed;
    double alpha = 1.0;
    std::string solver = "bundled";
    std::string solver_cmd;
    double max_seconds = 300.0;
    long max_nodes = 2000000;
    bool cost_tiebreak = false;
};

void add_input_flags(CLI::App* cmd, CommonArgs& args, bool with_alpha = true) {
    cmd->add_option("--spec", args.spec_path, "microgrid spec JSON file")->required();
    cmd->add_option("--event", args.event_path, "event profile JSON file")->required();
    cmd->add_option("--profiles", args.profiles_csv,
                    "CSV with time,critical_kw,<inverter names...> columns");
    cmd->add_option("--count", args.count, "Monte Carlo sample count");
    uint64_t* seed_slot = nullptr;
    auto opt = cmd->add_option_function<uint64_t>(
        "--seed", [&args](const uint64_t& s) { args.seed = s; }, "random seed (required)");
    opt->required();
    (void)seed_slot;
    if (with_alpha) {
        cmd->add_option("--alpha", args.alpha, "acceptable fraction of critical load");
    }
}

void add_solver_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--solver", args.solver, "bundled|external")
        ->check(CLI::IsMember({"bundled", "external"}));
    cmd->add_option("--solver-cmd", args.solver_cmd,
                    "external command with {input}/{output} placeholders "
                    "(default: RESILIX_SOLVER_CMD)");
    cmd->add_option("--max-seconds", args.max_seconds, "solve wall-clock budget");
    cmd->add_option("--max-nodes", args.max_nodes, "branch-and-bound node budget");
    cmd->add_flag("--cost-tiebreak", args.cost_tiebreak,
                  "re-solve with pinned success flags, minimizing operating cost");
}

RopConfig make_config(const CommonArgs& args) {
    RopConfig cfg;
    cfg.alpha = args.alpha;
    cfg.scenario_count = args.count;
    cfg.seed = args.seed;
    cfg.budget.max_wall_seconds = args.max_seconds;
    cfg.budget.max_nodes = args.max_nodes;
    cfg.cost_tiebreak = args.cost_tiebreak;
    if (args.solver == "external") {
        cfg.solver = SolverBackend::External;
        cfg.solver_command = args.solver_cmd;
        if (cfg.solver_command.empty()) {
            const char* env = std::getenv("RESILIX_SOLVER_CMD");
            if (env) cfg.solver_command = env;
        }
        if (cfg.solver_command.empty()) {
            throw Error(ErrorCode::SolverLaunchFailed,
                        "external solver selected but neither --solver-cmd nor "
                        "RESILIX_SOLVER_CMD is set");
        }
    }
    return cfg;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_text_file(out_path, content);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resilix - survivability-driven operational planning for islanded microgrids"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string out_path;
    std::string hist_out;
    std::string mode = "empirical";
    std::string recourse = "none";
    std::string alphas_text;
    double target_sr = 0.95;
    int max_dg = 3;
    std::string lp_in, sol_out;

    auto* scenarios = app.add_subcommand("scenarios", "generate a weighted failure scenario set");
    add_input_flags(scenarios, args, false);
    scenarios->add_option("--mode", mode, "empirical|analytic")
        ->check(CLI::IsMember({"empirical", "analytic"}));
    scenarios->add_option("--out", out_path, "output JSON path (default: stdout)");
    scenarios->add_option("--hist-out", hist_out, "failure-count plot data path");

    auto* rop = app.add_subcommand("rop", "solve the SR-optimal plan for one event");
    add_input_flags(rop, args);
    add_solver_flags(rop, args);
    rop->add_option("--out", out_path, "report JSON path");
    rop->add_option("--hist-out", hist_out, "failure-count plot data path");

    auto* mem = app.add_subcommand("mem", "score the cost-based baseline schedule");
    add_input_flags(mem, args);
    mem->add_option("--recourse", recourse, "none|redispatch")
        ->check(CLI::IsMember({"none", "redispatch"}));
    mem->add_option("--out", out_path, "output JSON path");

    auto* compare = app.add_subcommand("compare", "ROP vs MEM on a shared scenario set");
    add_input_flags(compare, args);
    add_solver_flags(compare, args);
    compare->add_option("--out", out_path, "report JSON path");
    compare->add_option("--hist-out", hist_out, "failure-count plot data path");

    auto* sweep = app.add_subcommand("alpha-sweep", "SR sensitivity to the alpha threshold");
    add_input_flags(sweep, args, false);
    add_solver_flags(sweep, args);
    sweep->add_option("--alphas", alphas_text, "comma-separated alpha list")->required();
    sweep->add_option("--out", out_path, "table JSON path");

    auto* plan = app.add_subcommand("plan", "full planning loop with DG enhancement");
    add_input_flags(plan, args);
    add_solver_flags(plan, args);
    plan->add_option("--target-sr", target_sr, "required survivability rate");
    plan->add_option("--max-dg", max_dg, "portable DG addition budget");
    plan->add_option("--out", out_path, "report JSON path");
    plan->add_option("--hist-out", hist_out, "failure-count plot data path");

    auto* oracle = app.add_subcommand("oracle", "brute-force optimal SR on tiny instances");
    add_input_flags(oracle, args);

    auto* solve_lp = app.add_subcommand("solve-lp", "solve an LP-format file, write a solution");
    solve_lp->add_option("input", lp_in, "LP file")->required();
    solve_lp->add_option("output", sol_out, "solution file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(scenarios)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            const auto probs = expand_event(event, spec.inverter_count());
            const auto set = generate_scenario_set(
                probs, args.count, args.seed,
                mode == "analytic" ? ProbabilityMode::Analytic : ProbabilityMode::Empirical);
            emit(out_path, scenario_set_to_json(set));
            if (!hist_out.empty()) {
                write_text_file(hist_out, histogram_to_plot_text(failure_count_histogram(set)));
            }
            std::cerr << "generated " << set.size() << " distinct scenarios from "
                      << set.sample_count << " samples\n";
            return kExitOk;
        }
        if (app.got_subcommand(rop) || app.got_subcommand(compare)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            RopConfig cfg = make_config(args);
            cfg.target_sr = 0.0;  // single solve, no enhancement
            cfg.max_added_dgs = 0;
            const auto report = run_rop(spec, event, cfg);
            std::cout << report_to_text(report);
            if (!out_path.empty()) write_text_file(out_path, report_to_json(report));
            if (!hist_out.empty()) {
                write_text_file(hist_out, histogram_to_plot_text(report.histogram));
            }
            return kExitOk;
        }
        if (app.got_subcommand(mem)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            const auto probs = expand_event(event, spec.inverter_count());
            const auto set = generate_scenario_set(probs, args.count, args.seed,
                                                   ProbabilityMode::Empirical);
            const MemSchedule schedule = build_mem_schedule(spec);
            const auto eval = evaluate_schedule_sr(
                schedule, spec, set, args.alpha,
                recourse == "redispatch" ? Recourse::Redispatch : Recourse::None);
            std::ostringstream oss;
            oss << "MEM cost " << schedule.total_cost << ", SR " << eval.sr << "\n";
            std::cout << oss.str();
            if (!out_path.empty()) {
                std::ostringstream json;
                json << "{\n  \"total_cost\": " << schedule.total_cost
                     << ",\n  \"sr\": " << eval.sr << "\n}\n";
                write_text_file(out_path, json.str());
            }
            return kExitOk;
        }
        if (app.got_subcommand(sweep)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            std::vector<double> alphas;
            std::stringstream ss(alphas_text);
            std::string field;
            while (std::getline(ss, field, ',')) {
                if (!field.empty()) alphas.push_back(std::stod(field));
            }
            const auto table = alpha_sweep(spec, event, alphas, make_config(args));
            std::cout << alpha_table_to_text(table);
            if (!out_path.empty()) write_text_file(out_path, alpha_table_to_json(table));
            return kExitOk;
        }
        if (app.got_subcommand(plan)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            RopConfig cfg = make_config(args);
            cfg.target_sr = target_sr;
            cfg.max_added_dgs = max_dg;
            const auto report = run_rop(spec, event, cfg);
            std::cout << report_to_text(report);
            if (!out_path.empty()) write_text_file(out_path, report_to_json(report));
            if (!hist_out.empty()) {
                write_text_file(hist_out, histogram_to_plot_text(report.histogram));
            }
            return kExitOk;
        }
        if (app.got_subcommand(oracle)) {
            auto [spec, event] = load_inputs(args.spec_path, args.event_path, args.profiles_csv);
            const auto probs = expand_event(event, spec.inverter_count());
            const auto set = generate_scenario_set(probs, args.count, args.seed,
                                                   ProbabilityMode::Empirical);
            const auto result = brute_force_sr(spec, set, args.alpha);
            std::cout << "oracle SR " << result.sr << "\n";
            return kExitOk;
        }
        if (app.got_subcommand(solve_lp)) {
            const MilpProblem problem = parse_lp_text(read_text_file(lp_in));
            const MilpSolution solution = solve_bundled(problem);
            if (solution.status != SolveStatus::Optimal) {
                std::cerr << "solve failed: " << solve_status_name(solution.status) << "\n";
                return kExitSolver;
            }
            write_text_file(sol_out, write_solution_text(problem, solution));
            std::cout << "objective " << solution.objective_value << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}

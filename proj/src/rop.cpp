#include "resilix/rop.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace resilix {

namespace {

MilpSolution solve_backend(const MilpProblem& problem, const RopConfig& cfg) {
    MilpSolution solution = cfg.solver == SolverBackend::External
                                ? solve_external(problem, cfg.solver_command, cfg.budget)
                                : solve_bundled(problem, cfg.budget);
    if (solution.status == SolveStatus::Infeasible) {
        throw Error(ErrorCode::Infeasible, "resilience model has no feasible solution");
    }
    if (solution.status == SolveStatus::BudgetExceeded) {
        throw Error(ErrorCode::BudgetExceeded, "solve budget exhausted before optimality");
    }
    return solution;
}

RopPlan solve_and_validate(const MicrogridSpec& spec, const ScenarioSet& set,
                           const RopConfig& cfg) {
    MilpProblem problem = build_rop_model(spec, set, cfg.alpha);
    MilpSolution solution = solve_backend(problem, cfg);
    RopPlan plan = extract_plan(problem, solution, set);
    if (cfg.cost_tiebreak) {
        MilpProblem tiebreak = build_cost_tiebreak_model(spec, set, cfg.alpha, plan);
        MilpSolution refined = solve_backend(tiebreak, cfg);
        plan = extract_tiebreak_plan(tiebreak, refined, set);
    }
    auto violations = validate_plan(spec, set, cfg.alpha, plan);
    if (!violations.empty()) {
        throw Error(ErrorCode::InfeasibleSolution, violations.front());
    }
    return plan;
}

}  // namespace

MicrogridSpec enhance_with_dg(const MicrogridSpec& spec) {
    GeneratorSpec unit;
    if (spec.portable_dg_template) {
        unit = *spec.portable_dg_template;
    } else {
        if (spec.inverters.empty()) {
            throw Error(ErrorCode::NoCapacityReference,
                        "no portable DG template and no inverter to size one from");
        }
        double peak = 0.0;
        for (const auto& inv : spec.inverters) {
            for (double v : inv.output_kw) peak = std::max(peak, v);
        }
        unit.name = "portable";
        unit.p_min_kw = 0.0;
        unit.p_max_kw = peak;
        unit.ramp_kw_per_h = peak;
        for (const auto& g : spec.generators) {
            std::string lower = g.name;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower.find("dg") != std::string::npos) {
                unit.op_cost_per_kwh = g.op_cost_per_kwh;
                unit.no_load_cost_per_h = g.no_load_cost_per_h;
                unit.startup_cost = g.startup_cost;
                break;
            }
        }
        unit.initially_on = false;
    }

    int existing = 0;
    for (const auto& g : spec.generators) {
        if (g.name.find("_pdg") != std::string::npos) ++existing;
    }
    unit.name += "_pdg" + std::to_string(existing + 1);

    MicrogridSpec enhanced = spec;
    enhanced.generators.push_back(std::move(unit));
    return enhanced;
}

SurvivabilityReport run_rop(const MicrogridSpec& spec, const EventProfile& event,
                            const RopConfig& cfg) {
    require_valid(spec, event);

    const ProbabilityMatrix probs = expand_event(event, spec.inverter_count());
    const ScenarioSet set =
        generate_scenario_set(probs, cfg.scenario_count, cfg.seed, ProbabilityMode::Empirical);

    SurvivabilityReport report;
    report.config = cfg;
    report.histogram = failure_count_histogram(set);

    MicrogridSpec current = spec;
    RopPlan plan = solve_and_validate(current, set, cfg);
    report.enhancement_trace.push_back({0, plan.sr});

    int added = 0;
    while (plan.sr < cfg.target_sr && added < cfg.max_added_dgs) {
        current = enhance_with_dg(current);
        ++added;
        plan = solve_and_validate(current, set, cfg);
        report.enhancement_trace.push_back({added, plan.sr});
    }

    report.rop_sr = plan.sr;
    report.plan = std::move(plan);
    report.final_spec = std::move(current);
    report.added_dg_count = added;
    report.enhancement_exhausted = report.rop_sr < cfg.target_sr;

    try {
        MemSchedule schedule = build_mem_schedule(spec, cfg.budget);
        report.mem_sr = evaluate_schedule_sr(schedule, spec, set, cfg.alpha, Recourse::None).sr;
        report.mem_feasible = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MemInfeasible) throw;
        report.mem_feasible = false;
        report.mem_sr = 0.0;
    }
    return report;
}

std::vector<std::pair<double, double>> alpha_sweep(const MicrogridSpec& spec,
                                                   const EventProfile& event,
                                                   std::vector<double> alphas,
                                                   const RopConfig& cfg) {
    if (alphas.empty()) {
        throw Error(ErrorCode::RangeViolation, "alpha sweep requires at least one alpha");
    }
    require_valid(spec, event);
    const ProbabilityMatrix probs = expand_event(event, spec.inverter_count());
    const ScenarioSet set =
        generate_scenario_set(probs, cfg.scenario_count, cfg.seed, ProbabilityMode::Empirical);

    std::sort(alphas.begin(), alphas.end());
    std::vector<std::pair<double, double>> table;
    table.reserve(alphas.size());
    for (double alpha : alphas) {
        RopConfig point = cfg;
        point.alpha = alpha;
        RopPlan plan = solve_and_validate(spec, set, point);
        table.emplace_back(alpha, plan.sr);
    }
    return table;
}

EventProfile build_staged_event(const std::vector<std::string>& labels,
                                const std::vector<int>& stage_lengths,
                                const std::map<std::string, std::vector<double>>& case_table) {
    if (labels.size() != stage_lengths.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "stage labels and stage lengths differ in count");
    }
    EventProfile event;
    for (size_t s = 0; s < labels.size(); ++s) {
        auto it = case_table.find(labels[s]);
        if (it == case_table.end()) {
            throw Error(ErrorCode::UnknownCaseLabel, "no failure case named '" + labels[s] + "'");
        }
        if (stage_lengths[s] < 1) {
            throw Error(ErrorCode::RangeViolation, "stage lengths must be positive");
        }
        event.stages.push_back(EventStage{stage_lengths[s], it->second});
    }
    return event;
}

const std::map<std::string, std::vector<double>>& bundled_failure_cases() {
    static const std::map<std::string, std::vector<double>> cases = {
        {"C1", {0.005}},
        {"C2", {0.01}},
        {"C3", {0.01, 0.01, 0.01, 0.01, 0.01, 0.02, 0.02, 0.02, 0.02, 0.02}},
        {"C4", {0.02}},
        {"C5", {0.03}},
        {"C6", {0.05}},
    };
    return cases;
}

}  // namespace resilix

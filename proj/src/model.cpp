#include "resilix/model.hpp"

#include <cmath>
#include <sstream>

namespace resilix {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::HorizonMismatch: return "HORIZON_MISMATCH";
        case ErrorCode::RangeViolation: return "RANGE_VIOLATION";
        case ErrorCode::SeedRequired: return "SEED_REQUIRED";
        case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::InfeasibleSolution: return "INFEASIBLE_SOLUTION";
        case ErrorCode::ObjectiveMismatch: return "OBJECTIVE_MISMATCH";
        case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
        case ErrorCode::Infeasible: return "INFEASIBLE";
        case ErrorCode::SolverLaunchFailed: return "SOLVER_LAUNCH_FAILED";
        case ErrorCode::SolutionParseError: return "SOLUTION_PARSE_ERROR";
        case ErrorCode::SolutionInvalid: return "SOLUTION_INVALID";
        case ErrorCode::MemInfeasible: return "MEM_INFEASIBLE";
        case ErrorCode::NoCapacityReference: return "NO_CAPACITY_REFERENCE";
        case ErrorCode::UnknownCaseLabel: return "UNKNOWN_CASE_LABEL";
        case ErrorCode::SizeLimitExceeded: return "SIZE_LIMIT_EXCEEDED";
        case ErrorCode::ParseError: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void add_issue(std::vector<ValidationIssue>& issues, ErrorCode code, const std::string& field,
               const std::string& message) {
    issues.push_back(ValidationIssue{code, field, message});
}

}  // namespace

std::vector<ValidationIssue> validate_spec(const MicrogridSpec& spec, const EventProfile& event) {
    std::vector<ValidationIssue> issues;

    if (spec.generators.empty() && spec.inverters.empty()) {
        add_issue(issues, ErrorCode::RangeViolation, "generators/inverters",
                  "microgrid has no generator and no inverter");
    }
    if (!(spec.interval_hours > 0.0) || !std::isfinite(spec.interval_hours)) {
        add_issue(issues, ErrorCode::RangeViolation, "interval_hours",
                  "interval_hours must be positive");
    }

    const int horizon = spec.horizon();
    if (horizon < 1) {
        add_issue(issues, ErrorCode::HorizonMismatch, "load.critical_kw",
                  "load profile must cover at least one interval");
    }
    for (double v : spec.load.critical_kw) {
        if (!finite_nonneg(v)) {
            add_issue(issues, ErrorCode::RangeViolation, "load.critical_kw",
                      "critical load values must be finite and >= 0");
            break;
        }
    }

    auto check_generator = [&](const GeneratorSpec& g, const std::string& where) {
        if (!finite_nonneg(g.p_min_kw) || !std::isfinite(g.p_max_kw) || g.p_min_kw > g.p_max_kw) {
            std::ostringstream oss;
            oss << "requires 0 <= p_min_kw <= p_max_kw, got [" << g.p_min_kw << ", " << g.p_max_kw
                << "]";
            add_issue(issues, ErrorCode::RangeViolation, where + ".p_min_kw/p_max_kw", oss.str());
        }
        if (!finite_nonneg(g.ramp_kw_per_h)) {
            add_issue(issues, ErrorCode::RangeViolation, where + ".ramp_kw_per_h",
                      "ramp must be >= 0");
        }
        if (!finite_nonneg(g.op_cost_per_kwh) || !finite_nonneg(g.no_load_cost_per_h) ||
            !finite_nonneg(g.startup_cost)) {
            add_issue(issues, ErrorCode::RangeViolation, where + ".costs",
                      "all costs must be >= 0");
        }
    };
    for (const auto& g : spec.generators) check_generator(g, "generators." + g.name);
    if (spec.portable_dg_template) check_generator(*spec.portable_dg_template, "portable_dg");

    for (const auto& inv : spec.inverters) {
        if (static_cast<int>(inv.output_kw.size()) != horizon) {
            std::ostringstream oss;
            oss << "inverter '" << inv.name << "' has " << inv.output_kw.size()
                << " output values, horizon is " << horizon;
            add_issue(issues, ErrorCode::HorizonMismatch, "inverters." + inv.name, oss.str());
        }
        for (double v : inv.output_kw) {
            if (!finite_nonneg(v)) {
                add_issue(issues, ErrorCode::RangeViolation, "inverters." + inv.name,
                          "output values must be finite and >= 0");
                break;
            }
        }
    }

    const int inverter_count = spec.inverter_count();
    int event_intervals = 0;
    for (size_t s = 0; s < event.stages.size(); ++s) {
        const auto& stage = event.stages[s];
        const std::string where = "event.stages[" + std::to_string(s) + "]";
        if (stage.intervals < 1) {
            add_issue(issues, ErrorCode::RangeViolation, where + ".intervals",
                      "stage interval count must be >= 1");
        }
        event_intervals += stage.intervals;
        if (stage.probs.empty()) {
            add_issue(issues, ErrorCode::RangeViolation, where + ".probs",
                      "stage must carry at least one probability");
        } else if (stage.probs.size() != 1 &&
                   static_cast<int>(stage.probs.size()) != inverter_count) {
            std::ostringstream oss;
            oss << "stage carries " << stage.probs.size() << " probabilities, expected 1 or "
                << inverter_count;
            add_issue(issues, ErrorCode::RangeViolation, where + ".probs", oss.str());
        }
        for (double p : stage.probs) {
            if (!(p >= 0.0 && p <= 1.0)) {
                std::ostringstream oss;
                oss << "probability " << p << " outside [0, 1]";
                add_issue(issues, ErrorCode::RangeViolation, where + ".probs", oss.str());
                break;
            }
        }
    }
    if (event_intervals != horizon) {
        std::ostringstream oss;
        oss << "event covers " << event_intervals << " intervals, horizon is " << horizon;
        add_issue(issues, ErrorCode::HorizonMismatch, "event.stages", oss.str());
    }

    return issues;
}

void require_valid(const MicrogridSpec& spec, const EventProfile& event) {
    auto issues = validate_spec(spec, event);
    if (issues.empty()) return;
    std::ostringstream oss;
    for (size_t k = 0; k < issues.size(); ++k) {
        if (k) oss << "; ";
        oss << error_code_name(issues[k].code) << " at " << issues[k].field << ": "
            << issues[k].message;
    }
    throw Error(issues.front().code, oss.str());
}

ProbabilityMatrix expand_event(const EventProfile& event, int inverter_count) {
    ProbabilityMatrix m;
    m.periods = event.total_intervals();
    m.inverters = inverter_count;
    m.cells.assign(static_cast<size_t>(m.periods) * inverter_count, 0.0);

    int t = 0;
    for (const auto& stage : event.stages) {
        for (int k = 0; k < stage.intervals; ++k, ++t) {
            for (int i = 0; i < inverter_count; ++i) {
                const double p = stage.probs.size() == 1 ? stage.probs[0] : stage.probs.at(i);
                m.at(t, i) = p;
            }
        }
    }
    return m;
}

}  // namespace resilix

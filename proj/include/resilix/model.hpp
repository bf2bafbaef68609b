#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resilix {

// Error codes shared across the toolkit. Validation routines collect
// ValidationIssue lists; hard failures throw Error.
enum class ErrorCode {
    HorizonMismatch,
    RangeViolation,
    SeedRequired,
    DimensionMismatch,
    InfeasibleSolution,
    ObjectiveMismatch,
    BudgetExceeded,
    Infeasible,
    SolverLaunchFailed,
    SolutionParseError,
    SolutionInvalid,
    MemInfeasible,
    NoCapacityReference,
    UnknownCaseLabel,
    SizeLimitExceeded,
    ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

struct ValidationIssue {
    ErrorCode code;
    std::string field;
    std::string message;
};

// Dispatchable unit: micro-turbine, fuel cell, diesel, or a portable DG
// added by the enhancement step. Powers in kW, ramp in kW/h, costs in
// currency units.
struct GeneratorSpec {
    std::string name;
    double p_min_kw = 0.0;
    double p_max_kw = 0.0;
    double ramp_kw_per_h = 0.0;
    double op_cost_per_kwh = 0.0;
    double no_load_cost_per_h = 0.0;
    double startup_cost = 0.0;
    bool initially_on = false;
};

// Renewable unit behind an inverter; output_kw has one entry per interval.
struct InverterSpec {
    std::string name;
    std::vector<double> output_kw;
};

struct LoadProfile {
    std::vector<double> critical_kw;
};

struct MicrogridSpec {
    std::vector<GeneratorSpec> generators;
    std::vector<InverterSpec> inverters;
    LoadProfile load;
    double interval_hours = 1.0;
    std::optional<GeneratorSpec> portable_dg_template;

    int horizon() const { return static_cast<int>(load.critical_kw.size()); }
    int generator_count() const { return static_cast<int>(generators.size()); }
    int inverter_count() const { return static_cast<int>(inverters.size()); }
};

// One stage of an event: a run of intervals sharing failure probabilities.
// probs holds either a single value (replicated across inverters) or one
// value per inverter.
struct EventStage {
    int intervals = 0;
    std::vector<double> probs;
};

struct EventProfile {
    std::vector<EventStage> stages;

    int total_intervals() const {
        int n = 0;
        for (const auto& s : stages) n += s.intervals;
        return n;
    }
};

// Probability matrix, row t = interval, column i = inverter.
struct ProbabilityMatrix {
    int periods = 0;
    int inverters = 0;
    std::vector<double> cells;  // row-major, periods x inverters

    double at(int t, int i) const { return cells[static_cast<size_t>(t) * inverters + i]; }
    double& at(int t, int i) { return cells[static_cast<size_t>(t) * inverters + i]; }
};

// Checks every type invariant of the spec and event pair. Returns an empty
// list when valid; otherwise one issue per violated invariant.
std::vector<ValidationIssue> validate_spec(const MicrogridSpec& spec, const EventProfile& event);

// Throwing convenience wrapper around validate_spec.
void require_valid(const MicrogridSpec& spec, const EventProfile& event);

// Expands a staged event into a (T x I) probability matrix: row t carries
// the probability of the stage containing interval t, replicated across
// inverters unless the stage supplies a per-inverter vector.
ProbabilityMatrix expand_event(const EventProfile& event, int inverter_count);

}  // namespace resilix

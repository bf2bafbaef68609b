#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resilix/mem.hpp"
#include "resilix/model.hpp"
#include "resilix/rop_model.hpp"
#include "resilix/scenario.hpp"
#include "resilix/solver.hpp"

namespace resilix {

enum class SolverBackend { Bundled, External };

struct RopConfig {
    double alpha = 1.0;
    double target_sr = 0.95;
    long scenario_count = 1000;
    std::optional<uint64_t> seed;
    int max_added_dgs = 0;
    SolverBackend solver = SolverBackend::Bundled;
    std::string solver_command;  // used when solver == External
    SolveBudget budget;
    // Second solve phase pinning the success flags and minimizing operating
    // cost, so one reproducible plan is picked among the SR-optimal ones.
    bool cost_tiebreak = false;
};

struct EnhancementStep {
    int added_dg_count = 0;
    double sr = 0.0;
};

struct SurvivabilityReport {
    double rop_sr = 0.0;
    double mem_sr = 0.0;
    bool mem_feasible = true;
    std::vector<EnhancementStep> enhancement_trace;
    bool enhancement_exhausted = false;
    RopPlan plan;  // plan for the final (possibly enhanced) system
    FailureHistogram histogram;
    RopConfig config;
    MicrogridSpec final_spec;
    int added_dg_count = 0;
};

// The two-step algorithm: generate scenarios, solve for the SR-optimal
// plan, then add portable DGs and re-solve on the same scenario set until
// the target SR is met or the addition budget runs out. Also scores the
// cost-based baseline on the same set. Every solve is re-checked by the
// plan validator.
SurvivabilityReport run_rop(const MicrogridSpec& spec, const EventProfile& event,
                            const RopConfig& cfg);

// Appends one portable DG. An explicit template wins; otherwise the unit
// is sized to the largest inverter peak with zero minimum, a one-hour
// full-range ramp, and costs copied from a DG-named generator if present.
MicrogridSpec enhance_with_dg(const MicrogridSpec& spec);

// One SR-optimal solve per alpha on a shared scenario set, sorted by alpha.
std::vector<std::pair<double, double>> alpha_sweep(const MicrogridSpec& spec,
                                                   const EventProfile& event,
                                                   std::vector<double> alphas,
                                                   const RopConfig& cfg);

// Builds a staged event from named failure cases, e.g. {"C2","C6","C2"}
// with stage lengths {4,4,4}.
EventProfile build_staged_event(const std::vector<std::string>& labels,
                                const std::vector<int>& stage_lengths,
                                const std::map<std::string, std::vector<double>>& case_table);

// The bundled ten-inverter failure cases C1..C6.
const std::map<std::string, std::vector<double>>& bundled_failure_cases();

}  // namespace resilix

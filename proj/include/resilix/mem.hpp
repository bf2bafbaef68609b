#pragma once

#include <vector>

#include "resilix/model.hpp"
#include "resilix/scenario.hpp"
#include "resilix/solver.hpp"

namespace resilix {

// Deterministic cost-minimizing schedule: commitment, dispatch, and
// inverter usage fixed before any failure is known.
struct MemSchedule {
    std::vector<std::vector<uint8_t>> commitment;     // [g][t]
    std::vector<std::vector<double>> dispatch;        // [g][t]
    std::vector<std::vector<uint8_t>> inverter_usage; // [i][t]
    double total_cost = 0.0;
};

// Solves the cost-minimizing unit commitment assuming every inverter stays
// healthy: output and ramp limits, startup accounting, and full critical
// load coverage each interval. Renewables are free, so every inverter with
// positive output is used. Throws MEM_INFEASIBLE when capacity cannot
// cover the critical load even with all assets.
MemSchedule build_mem_schedule(const MicrogridSpec& spec, const SolveBudget& budget = {});

double mem_schedule_cost(const MicrogridSpec& spec, const MemSchedule& schedule);

enum class Recourse { None, Redispatch };

struct SrEvaluation {
    double sr = 0.0;
    std::vector<uint8_t> scenario_success;
};

// Simulates the fixed schedule through each failure scenario: an inverter
// used while flagged is lost from the next interval to the end of the
// horizon. recourse=none keeps generator outputs fixed; redispatch
// re-optimizes them within the fixed commitment and ramp limits to
// maximize the minimum margin. An interval succeeds when net power meets
// alpha times the critical load.
SrEvaluation evaluate_schedule_sr(const MemSchedule& schedule, const MicrogridSpec& spec,
                                  const ScenarioSet& set, double alpha, Recourse recourse);

}  // namespace resilix

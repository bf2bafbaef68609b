#pragma once

#include <vector>

#include "resilix/model.hpp"
#include "resilix/scenario.hpp"

namespace resilix {

struct OracleLimits {
    int max_gen_cells = 12;   // G * T
    int max_inv_cells = 12;   // I * T
    int max_scenarios = 64;
};

struct OracleResult {
    double sr = 0.0;
    std::vector<std::vector<uint8_t>> best_commitment;                  // [g][t]
    std::vector<std::vector<std::vector<uint8_t>>> per_scenario_policies;  // [w][i][t]
    std::vector<uint8_t> per_scenario_success;
};

// Independent brute force over every commitment and every inverter-usage
// matrix consistent with availability propagation. A usage matrix succeeds
// when some generator dispatch within commitment bounds and ramp limits
// covers the residual demand at every interval, checked as a linear
// feasibility problem. Exists to certify the MILP path on tiny instances.
OracleResult brute_force_sr(const MicrogridSpec& spec, const ScenarioSet& set, double alpha,
                            const OracleLimits& limits = {});

}  // namespace resilix

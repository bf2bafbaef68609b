#pragma once

#include <vector>

#include "resilix/milp.hpp"
#include "resilix/model.hpp"
#include "resilix/scenario.hpp"
#include "resilix/solver.hpp"

namespace resilix {

struct BigM {
    double value = 0.0;
    bool degenerate = false;  // no capacity and no load at all
};

// M = sum of generator maxima + sum of inverter peaks + alpha * peak
// critical load; dominates both deviations of net power from the alpha
// threshold, so the indicator constraints are exact.
BigM compute_big_m(const MicrogridSpec& spec, double alpha);

// Translates the microgrid, a weighted scenario set, and the acceptance
// fraction alpha into the stochastic MILP: shared commitment, per-scenario
// dispatch and inverter usage, availability propagation of used-and-failed
// inverters, big-M success indicators per interval, and per-scenario
// success flags whose probability-weighted sum is the maximized SR.
MilpProblem build_rop_model(const MicrogridSpec& spec, const ScenarioSet& set, double alpha);

// Variable id lookup rebuilt from a problem's annotations.
class RopVarIndex {
  public:
    explicit RopVarIndex(const MilpProblem& problem);

    int gen_count, horizon, inverter_count, scenario_count;

    int gen_commit(int g, int t) const { return ug_[g * horizon + t]; }
    int gen_power(int g, int t, int w) const { return pg_[(g * horizon + t) * scenario_count + w]; }
    int inv_use(int i, int t, int w) const { return v_[(i * horizon + t) * scenario_count + w]; }
    int inv_avail(int i, int t, int w) const { return ui_[(i * horizon + t) * scenario_count + w]; }
    int inv_fail(int i, int t, int w) const { return wf_[(i * horizon + t) * scenario_count + w]; }
    int interval_success(int t, int w) const { return xt_[t * scenario_count + w]; }
    int scenario_success(int w) const { return xs_[w]; }
    int surplus(int t, int w) const { return y_[t * scenario_count + w]; }
    int net_power(int t, int w) const { return pnet_[t * scenario_count + w]; }

  private:
    std::vector<int> ug_, pg_, v_, ui_, wf_, xt_, xs_, y_, pnet_;
};

// Solved first-stage commitment plus per-scenario recourse values.
struct RopPlan {
    double sr = 0.0;
    std::vector<std::vector<uint8_t>> commitment;              // [g][t]
    std::vector<std::vector<std::vector<double>>> dispatch;    // [w][g][t]
    std::vector<std::vector<std::vector<uint8_t>>> usage;      // [w][i][t]
    std::vector<std::vector<std::vector<uint8_t>>> availability;  // [w][i][t]
    std::vector<std::vector<uint8_t>> interval_success;        // [w][t]
    std::vector<uint8_t> scenario_success;                     // [w]
    std::vector<std::vector<double>> net_power;                // [w][t]
};

// Maps a solved model back to a plan. Re-checks the solution against the
// problem, recomputes the SR from the scenario flags and weights, and
// requires it to agree with the solver's objective within 1e-6.
RopPlan extract_plan(const MilpProblem& problem, const MilpSolution& solution,
                     const ScenarioSet& set);

// Tie-break phase: same feasible set with every success flag pinned to the
// plan's values, objective switched to minimizing operating cost (no-load
// per committed interval plus probability-weighted fuel). Solving it picks
// one reproducible plan among the SR-optimal ones.
MilpProblem build_cost_tiebreak_model(const MicrogridSpec& spec, const ScenarioSet& set,
                                      double alpha, const RopPlan& plan);

// extract_plan for the tie-break model, whose objective is a cost rather
// than the SR.
RopPlan extract_tiebreak_plan(const MilpProblem& problem, const MilpSolution& solution,
                              const ScenarioSet& set);

// Semantic validation of a plan against the formulation's invariants:
// commitment-linked output limits, ramping, availability monotonicity and
// propagation, w = v AND f, net-power accounting, indicator semantics in
// both directions, and scenario success as the minimum interval flag.
// Returns violation descriptions; empty means the plan is consistent.
std::vector<std::string> validate_plan(const MicrogridSpec& spec, const ScenarioSet& set,
                                       double alpha, const RopPlan& plan, double tol = 1e-6);

}  // namespace resilix

#pragma once

#include <string>
#include <vector>

#include "resilix/milp.hpp"
#include "resilix/simplex.hpp"

namespace resilix {

enum class SolveStatus { Optimal, Infeasible, BudgetExceeded };

const char* solve_status_name(SolveStatus status);

struct SolveBudget {
    double max_wall_seconds = 300.0;
    long max_nodes = 2000000;
    double relative_gap = 1e-6;
};

struct SolveStats {
    long nodes_explored = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;
};

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective_value = 0.0;
    std::vector<double> values;  // empty when no incumbent exists
    double bound_gap = 0.0;
    SolveStats stats;

    bool has_incumbent() const { return status == SolveStatus::Optimal || !values.empty(); }
};

// Exact branch-and-bound over the binary variables with an LP relaxation
// per node. Node order is best-bound with ties broken by creation order;
// branching picks the most fractional binary, ties by lowest variable id.
// Deterministic for equal (problem, budget) up to the wall-clock limit.
MilpSolution solve_bundled(const MilpProblem& problem, const SolveBudget& budget = {});

// Writes an LP-format file, runs `command` with {input} and {output}
// substituted, parses the produced "name value" solution file, and
// validates it against the problem before returning.
MilpSolution solve_external(const MilpProblem& problem, const std::string& command,
                            const SolveBudget& budget = {});

}  // namespace resilix

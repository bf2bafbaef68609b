#include "resilix/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace resilix {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    long id = 0;
    long parent = -1;
    int branch_var = -1;   // branching decision leading to this node
    int branch_value = 0;
    double bound = 0.0;
    int next_branch = -1;  // variable this node will branch on
    std::vector<double> values;
};

struct NodeOrder {
    // Max-heap on bound; among equal bounds the newest node wins, so the
    // search dives and resolves one scenario block before the next.
    bool operator()(const std::pair<double, long>& a, const std::pair<double, long>& b) const {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    }
};

// Quantum of the objective lattice when every objective term sits on a
// binary variable: any attainable objective is then an integer multiple
// of the real gcd of the coefficients, which sharpens pruning without
// losing exactness. Returns 0 when no usable lattice exists.
double objective_quantum(const MilpProblem& problem) {
    double g = 0.0;
    for (const auto& term : problem.objective) {
        if (term.coef == 0.0) continue;
        if (problem.variables[term.var].kind != VarKind::Binary) return 0.0;
        double b = std::abs(term.coef);
        if (g == 0.0) {
            g = b;
            continue;
        }
        // Euclid on reals with a tolerance floor.
        double a = std::max(g, b);
        b = std::min(g, b);
        while (b > 1e-9) {
            const double r = std::fmod(a, b);
            a = b;
            b = r < 1e-9 || b - r < 1e-9 ? 0.0 : r;
        }
        g = a;
        if (g < 1e-7) return 0.0;
    }
    return g;
}

}  // namespace

const char* solve_status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::BudgetExceeded: return "budget_exceeded";
    }
    return "unknown";
}

MilpSolution solve_bundled(const MilpProblem& problem, const SolveBudget& budget) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const int n = problem.variable_count();
    std::vector<double> base_lower(n), base_upper(n);
    for (int j = 0; j < n; ++j) {
        base_lower[j] = problem.variables[j].lower;
        base_upper[j] = problem.variables[j].upper;
    }
    const double quantum = objective_quantum(problem);
    std::vector<char> in_objective(n, 0);
    for (const auto& term : problem.objective) {
        if (term.coef != 0.0) in_objective[term.var] = 1;
    }

    SimplexSolver lp;
    MilpSolution result;
    bool have_incumbent = false;
    double incumbent = -std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_values;
    bool budget_hit = false;

    auto prunable = [&](double bound) {
        if (!have_incumbent) return false;
        const double gap_eps = budget.relative_gap * std::max(1.0, std::abs(incumbent));
        if (bound <= incumbent + gap_eps) return true;
        if (quantum > 0.0) {
            // Round the bound down to the attainable lattice.
            const double snapped = std::floor(bound / quantum + 1e-7) * quantum;
            if (snapped <= incumbent + gap_eps) return true;
        }
        return false;
    };

    std::vector<Node> nodes;
    std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>, NodeOrder>
        open;
    std::vector<double> lower(n), upper(n);

    // Solves a node's relaxation; queues it, folds it into the incumbent,
    // or discards it. Returns false when the budget is exhausted.
    auto create_node = [&](long parent, int branch_var, int branch_value) -> bool {
        if (result.stats.nodes_explored >= budget.max_nodes ||
            elapsed() > budget.max_wall_seconds) {
            budget_hit = true;
            return false;
        }
        lower = base_lower;
        upper = base_upper;
        if (parent >= 0 && branch_var >= 0) {
            lower[branch_var] = branch_value;
            upper[branch_var] = branch_value;
            for (long cur = parent; cur > 0; cur = nodes[cur].parent) {
                const Node& nd = nodes[cur];
                lower[nd.branch_var] = nd.branch_value;
                upper[nd.branch_var] = nd.branch_value;
            }
        }

        LpResult rel = lp.solve(problem, lower, upper);
        ++result.stats.nodes_explored;
        result.stats.lp_iterations += rel.iterations;
        if (rel.status == LpStatus::Infeasible) return true;
        if (rel.status == LpStatus::Unbounded) {
            throw Error(ErrorCode::RangeViolation,
                        "relaxation is unbounded; every variable of a well-formed problem must "
                        "be bounded");
        }
        if (rel.status == LpStatus::IterationLimit) {
            throw Error(ErrorCode::BudgetExceeded, "LP relaxation hit its iteration safeguard");
        }
        if (prunable(rel.objective)) return true;

        // Fractional binaries that carry objective weight gate the bound
        // directly (the scenario-success indicators), so they branch
        // first; most-fractional with lowest-id ties within each tier.
        int next_branch = -1;
        double branch_score = kIntTol;
        bool branch_in_obj = false;
        for (int j = 0; j < n; ++j) {
            if (problem.variables[j].kind != VarKind::Binary) continue;
            const double x = rel.values[j];
            const double frac = std::min(x - std::floor(x), std::ceil(x) - x);
            if (frac <= kIntTol) continue;
            const bool is_obj = in_objective[j] != 0;
            if ((is_obj && !branch_in_obj) ||
                (is_obj == branch_in_obj && frac > branch_score)) {
                branch_score = frac;
                next_branch = j;
                branch_in_obj = is_obj;
            }
        }
        if (next_branch < 0) {
            const double value = problem.objective_value(rel.values);
            if (!have_incumbent || value > incumbent) {
                have_incumbent = true;
                incumbent = value;
                incumbent_values = rel.values;
                for (int j = 0; j < n; ++j) {
                    if (problem.variables[j].kind == VarKind::Binary) {
                        incumbent_values[j] = std::round(incumbent_values[j]);
                    }
                }
            }
            return true;
        }

        Node node;
        node.id = static_cast<long>(nodes.size());
        node.parent = parent;
        node.branch_var = branch_var;
        node.branch_value = branch_value;
        node.bound = rel.objective;
        node.next_branch = next_branch;
        node.values = std::move(rel.values);
        nodes.push_back(std::move(node));
        open.push({nodes.back().bound, nodes.back().id});
        return true;
    };

    double best_open_bound = std::numeric_limits<double>::infinity();
    if (create_node(-1, -1, 0)) {
        while (!open.empty()) {
            const auto [bound, id] = open.top();
            best_open_bound = bound;
            if (prunable(bound)) break;  // best-first: nothing left can win
            open.pop();
            nodes[id].values.clear();
            nodes[id].values.shrink_to_fit();
            if (!create_node(id, nodes[id].next_branch, 0)) break;
            if (!create_node(id, nodes[id].next_branch, 1)) break;
        }
    }

    result.stats.wall_seconds = elapsed();
    if (budget_hit) {
        result.status = SolveStatus::BudgetExceeded;
        if (have_incumbent) {
            result.objective_value = incumbent;
            result.values = std::move(incumbent_values);
            result.bound_gap =
                (best_open_bound - incumbent) / std::max(1.0, std::abs(incumbent));
        } else {
            result.bound_gap = std::numeric_limits<double>::infinity();
        }
        return result;
    }
    if (!have_incumbent) {
        result.status = SolveStatus::Infeasible;
        return result;
    }
    result.status = SolveStatus::Optimal;
    result.objective_value = incumbent;
    result.values = std::move(incumbent_values);
    result.bound_gap = 0.0;
    return result;
}

}  // namespace resilix

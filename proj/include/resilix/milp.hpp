#pragma once

#include <array>
#include <string>
#include <vector>

#include "resilix/model.hpp"

namespace resilix {

enum class VarKind { Continuous, Binary };

// Variable families of the resilience model plus generic slots used by
// other problems (MEM unit commitment, dispatch feasibility checks).
enum class VarFamily {
    Generic,
    GenCommit,        // u^G[g][t]
    GenPower,         // P^G[g][t][w]
    InvUse,           // v[i][t][w]
    InvAvail,         // u^I[i][t][w]
    InvFailConfirm,   // w[i][t][w]
    IntervalSuccess,  // X^T[t][w]
    ScenarioSuccess,  // X[w]
    Surplus,          // Y[t][w]
    NetPower,         // P^NET[t][w]
    GenStartup,       // MEM startup indicator s[g][t]
};

struct VarInfo {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    VarKind kind = VarKind::Continuous;
    VarFamily family = VarFamily::Generic;
    // Meaning depends on the family: idx = {g|i|t, t|w, w} with -1 for
    // unused positions; see the builder for the exact layout.
    std::array<int, 3> idx = {-1, -1, -1};
};

enum class Sense { LessEq, Eq, GreaterEq };

struct LinearTerm {
    int var = -1;
    double coef = 0.0;
};

struct LinearConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    Sense sense = Sense::LessEq;
    double rhs = 0.0;
};

struct MilpProblem {
    std::vector<VarInfo> variables;
    std::vector<LinearConstraint> constraints;
    std::vector<LinearTerm> objective;  // always maximized
    std::string name = "problem";

    int add_variable(VarInfo info) {
        variables.push_back(std::move(info));
        return static_cast<int>(variables.size()) - 1;
    }

    void add_constraint(LinearConstraint c) { constraints.push_back(std::move(c)); }

    int variable_count() const { return static_cast<int>(variables.size()); }
    int constraint_count() const { return static_cast<int>(constraints.size()); }
    int binary_count() const {
        int n = 0;
        for (const auto& v : variables) n += v.kind == VarKind::Binary ? 1 : 0;
        return n;
    }

    // Evaluates the objective the same way everywhere: term order, binary
    // values rounded to exact 0/1. Keeps independently computed optima
    // bit-comparable.
    double objective_value(const std::vector<double>& values) const;
};

// Checks bounds, integrality, and every constraint at the given tolerance.
// Returns human-readable violation descriptions; empty means feasible.
std::vector<std::string> check_solution(const MilpProblem& problem,
                                        const std::vector<double>& values, double tol = 1e-6);

}  // namespace resilix

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "resilix/scenario.hpp"
#include "resilix/simplex.hpp"

using namespace resilix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int add_var(MilpProblem& p, const std::string& name, double lo, double hi) {
    VarInfo v;
    v.name = name;
    v.lower = lo;
    v.upper = hi;
    return p.add_variable(v);
}

}  // namespace

TEST_CASE("single bounded variable maximizes at its upper bound") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 3.7);
    p.objective = {{x, 1.0}};
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(3.7));
    CHECK(r.values[x] == doctest::Approx(3.7));
}

TEST_CASE("two variables against a shared budget") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 1.0);
    int y = add_var(p, "y", 0.0, 1.0);
    p.objective = {{x, 1.0}, {y, 1.0}};
    p.add_constraint({"budget", {{x, 1.0}, {y, 1.0}}, Sense::LessEq, 1.5});
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(1.5));
}

TEST_CASE("conflicting bounds are infeasible") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 10.0);
    p.objective = {{x, 1.0}};
    p.add_constraint({"lo", {{x, 1.0}}, Sense::GreaterEq, 5.0});
    p.add_constraint({"hi", {{x, 1.0}}, Sense::LessEq, 4.0});
    SimplexSolver lp;
    CHECK(lp.solve(p).status == LpStatus::Infeasible);
}

TEST_CASE("free improving direction is unbounded") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, kInf);
    p.objective = {{x, 1.0}};
    p.add_constraint({"slackish", {{x, -1.0}}, Sense::LessEq, 1.0});
    SimplexSolver lp;
    CHECK(lp.solve(p).status == LpStatus::Unbounded);
}

TEST_CASE("equality rows are honoured") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 10.0);
    int y = add_var(p, "y", 0.0, 10.0);
    p.objective = {{x, 2.0}, {y, 1.0}};
    p.add_constraint({"eq", {{x, 1.0}, {y, 1.0}}, Sense::Eq, 4.0});
    p.add_constraint({"cap", {{x, 1.0}}, Sense::LessEq, 3.0});
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(7.0));  // x=3, y=1
    CHECK(r.values[x] == doctest::Approx(3.0));
    CHECK(r.values[y] == doctest::Approx(1.0));
}

TEST_CASE("free variables can go negative") {
    MilpProblem p;
    int x = add_var(p, "x", -kInf, kInf);
    p.objective = {{x, -1.0}};
    p.add_constraint({"floor", {{x, 1.0}}, Sense::GreaterEq, -2.5});
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.values[x] == doctest::Approx(-2.5));
    CHECK(r.objective == doctest::Approx(2.5));
}

TEST_CASE("degenerate vertex stack does not cycle") {
    // Many redundant constraints meeting at the same vertex.
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 10.0);
    int y = add_var(p, "y", 0.0, 10.0);
    p.objective = {{x, 1.0}, {y, 1.0}};
    for (int k = 1; k <= 12; ++k) {
        p.add_constraint({"c" + std::to_string(k), {{x, static_cast<double>(k)}, {y, 1.0}},
                          Sense::LessEq, static_cast<double>(k)});
    }
    p.add_constraint({"sum", {{x, 1.0}, {y, 1.0}}, Sense::LessEq, 1.0});
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("negative bounds and upper-start variables") {
    MilpProblem p;
    int x = add_var(p, "x", -5.0, -1.0);
    int y = add_var(p, "y", -kInf, 2.0);
    p.objective = {{x, 1.0}, {y, 3.0}};
    p.add_constraint({"mix", {{x, 1.0}, {y, 1.0}}, Sense::LessEq, 0.0});
    SimplexSolver lp;
    auto r = lp.solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    // y = 2 at its bound forces x down to -2 through the row.
    CHECK(r.values[x] == doctest::Approx(-2.0));
    CHECK(r.values[y] == doctest::Approx(2.0));
    CHECK(r.objective == doctest::Approx(4.0));
}

TEST_CASE("random box LPs: result feasible and no sampled point beats it") {
    SplitMix64 rng(314);
    for (int trial = 0; trial < 40; ++trial) {
        MilpProblem p;
        const int n = 2 + static_cast<int>(rng.next_u64() % 4);
        const int m = 1 + static_cast<int>(rng.next_u64() % 5);
        for (int j = 0; j < n; ++j) {
            add_var(p, "x" + std::to_string(j), 0.0,
                    1.0 + static_cast<double>(rng.next_u64() % 9));
            p.objective.push_back({j, static_cast<double>(rng.next_u64() % 19) - 9.0});
        }
        for (int i = 0; i < m; ++i) {
            LinearConstraint c;
            c.name = "c" + std::to_string(i);
            for (int j = 0; j < n; ++j) {
                const double coef = static_cast<double>(rng.next_u64() % 11) - 5.0;
                if (coef != 0.0) c.terms.push_back({j, coef});
            }
            c.sense = Sense::LessEq;
            c.rhs = static_cast<double>(rng.next_u64() % 30);
            p.add_constraint(std::move(c));
        }
        SimplexSolver lp;
        auto r = lp.solve(p);
        REQUIRE(r.status == LpStatus::Optimal);  // x = 0 is always feasible
        CHECK(check_solution(p, r.values, 1e-6).empty());

        // Monte Carlo feasible points must not beat the reported optimum.
        for (int probe = 0; probe < 200; ++probe) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j) {
                x[j] = rng.next_uniform() * p.variables[j].upper;
            }
            if (!check_solution(p, x, 1e-9).empty()) continue;
            double value = 0.0;
            for (const auto& term : p.objective) value += term.coef * x[term.var];
            CHECK(value <= r.objective + 1e-6);
        }
    }
}

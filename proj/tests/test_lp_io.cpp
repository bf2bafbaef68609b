#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "resilix/lp_io.hpp"
#include "resilix/model.hpp"
#include "resilix/rop_model.hpp"
#include "resilix/scenario.hpp"
#include "resilix/solver.hpp"

using namespace resilix;

namespace {

int add_var(MilpProblem& p, const std::string& name, double lo, double hi,
            VarKind kind = VarKind::Continuous) {
    VarInfo v;
    v.name = name;
    v.lower = lo;
    v.upper = hi;
    v.kind = kind;
    return p.add_variable(v);
}

MicrogridSpec tiny_spec() {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"dg", 0.0, 5.0, 100.0, 0.1, 0.5, 1.0, false}};
    InverterSpec inv;
    inv.name = "pv";
    inv.output_kw = {10.0, 10.0};
    spec.inverters = {inv};
    spec.load.critical_kw = {10.0, 10.0};
    return spec;
}

ScenarioSet tiny_set() {
    ScenarioSet set;
    FailureMatrix zero;
    zero.periods = 2;
    zero.inverters = 1;
    zero.flags = {0, 0};
    set.scenarios = {zero};
    set.weights = {1.0};
    set.occurrences = {1};
    set.sample_count = 1;
    set.seed = 0;
    return set;
}

}  // namespace

TEST_CASE("empty problem writes a skeleton document") {
    MilpProblem p;
    p.name = "empty";
    const std::string text = write_lp_text(p);
    CHECK(text == "\\ empty\nMaximize\n obj: 0\nSubject To\nBounds\nEnd\n");
    MilpProblem back = parse_lp_text(text);
    CHECK(back.variable_count() == 0);
    CHECK(back.constraint_count() == 0);
}

TEST_CASE("single constraint renders its terms") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 10.0);
    int y = add_var(p, "y", 0.0, 10.0);
    p.objective = {{x, 1.0}};
    p.add_constraint({"cap", {{x, 1.0}, {y, 2.0}}, Sense::LessEq, 3.0});
    const std::string text = write_lp_text(p);
    CHECK(text.find(" cap: + x + 2 y <= 3\n") != std::string::npos);
}

TEST_CASE("writer output is byte-stable") {
    MicrogridSpec spec = tiny_spec();
    ScenarioSet set = tiny_set();
    MilpProblem p = build_rop_model(spec, set, 1.0);
    CHECK(write_lp_text(p) == write_lp_text(p));
}

TEST_CASE("lp text round-trips through the parser") {
    MicrogridSpec spec = tiny_spec();
    ScenarioSet set = tiny_set();
    MilpProblem original = build_rop_model(spec, set, 1.0);
    const std::string text = write_lp_text(original);
    MilpProblem parsed = parse_lp_text(text);

    REQUIRE(parsed.variable_count() == original.variable_count());
    REQUIRE(parsed.constraint_count() == original.constraint_count());
    CHECK(parsed.binary_count() == original.binary_count());

    // Variables keep their names, bounds, and kinds (order may differ:
    // the parser numbers variables by first use).
    std::map<std::string, std::tuple<double, double, VarKind>> expected;
    for (const auto& v : original.variables) expected[v.name] = {v.lower, v.upper, v.kind};
    for (const auto& v : parsed.variables) {
        REQUIRE(expected.count(v.name) == 1);
        auto [lo, hi, kind] = expected[v.name];
        CHECK(v.lower == lo);
        CHECK(v.upper == hi);
        CHECK(v.kind == kind);
    }

    // A second write-parse cycle is a fixed point.
    CHECK(write_lp_text(parse_lp_text(write_lp_text(parsed))) == write_lp_text(parsed));

    auto a = solve_bundled(original);
    auto b = solve_bundled(parsed);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-9));
}

TEST_CASE("rop export section sizes match the model counts") {
    MicrogridSpec spec = tiny_spec();
    ScenarioSet set = tiny_set();
    MilpProblem p = build_rop_model(spec, set, 1.0);
    const std::string text = write_lp_text(p);

    size_t subject_lines = 0;
    size_t binary_lines = 0;
    bool in_subject = false, in_binary = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line == "Subject To") {
            in_subject = true;
            continue;
        }
        if (line == "Bounds") in_subject = false;
        if (line == "Binary") {
            in_binary = true;
            continue;
        }
        if (line == "End") in_binary = false;
        if (in_subject && !line.empty()) ++subject_lines;
        if (in_binary && !line.empty()) ++binary_lines;
    }
    CHECK(subject_lines == static_cast<size_t>(p.constraint_count()));
    CHECK(binary_lines == static_cast<size_t>(p.binary_count()));
}

TEST_CASE("minimize objectives parse with negated coefficients") {
    const std::string text =
        "Minimize\n obj: 2 x + y\nSubject To\n c0: x + y >= 1\nBounds\n x <= 4\nEnd\n";
    MilpProblem p = parse_lp_text(text);
    REQUIRE(p.objective.size() == 2);
    CHECK(p.objective[0].coef == -2.0);
    auto s = solve_bundled(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(-1.0));  // y = 1 is cheapest
}

TEST_CASE("garbage input raises a parse error") {
    CHECK_THROWS_AS(parse_lp_text("this is not an lp file at all"), Error);
}

TEST_CASE("solution text round-trips") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 4.0);
    int b = add_var(p, "b", 0.0, 1.0, VarKind::Binary);
    p.objective = {{x, 1.0}, {b, 2.0}};
    p.add_constraint({"cap", {{x, 1.0}, {b, 1.0}}, Sense::LessEq, 4.0});
    auto s = solve_bundled(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    const std::string text = write_solution_text(p, s);
    auto values = parse_solution_text(p, text);
    CHECK(values == s.values);
}

TEST_CASE("solution parser rejects unknown names and bad numbers") {
    MilpProblem p;
    add_var(p, "x", 0.0, 4.0);
    CHECK_THROWS_WITH_AS(parse_solution_text(p, "ghost 1\n"), doctest::Contains("unknown"),
                         Error);
    CHECK_THROWS_AS(parse_solution_text(p, "x pear\n"), Error);
    auto values = parse_solution_text(p, "# comment\n=obj= 3\nx 2.5\n");
    CHECK(values[0] == 2.5);
}

TEST_CASE("external bridge runs a command and validates its output") {
    MilpProblem p;
    int x = add_var(p, "x", 0.0, 4.0);
    int b = add_var(p, "b", 0.0, 1.0, VarKind::Binary);
    p.objective = {{x, 1.0}, {b, 1.0}};
    p.add_constraint({"cap", {{x, 1.0}, {b, 2.0}}, Sense::LessEq, 5.0});

    const std::string prepared = "/tmp/resilix_test_prepared.sol";
    {
        std::ofstream out(prepared);
        out << "# fixture\n=obj= 5\nx 3\nb 1\n";
    }
    auto s = solve_external(p, "cp " + prepared + " {output} # {input}");
    CHECK(s.status == SolveStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(4.0));
    std::remove(prepared.c_str());
}

TEST_CASE("fractional binaries from an external solver are invalid") {
    MilpProblem p;
    add_var(p, "b", 0.0, 1.0, VarKind::Binary);
    p.objective = {{0, 1.0}};

    const std::string prepared = "/tmp/resilix_test_fractional.sol";
    {
        std::ofstream out(prepared);
        out << "b 0.5\n";
    }
    CHECK_THROWS_WITH_AS(solve_external(p, "cp " + prepared + " {output} # {input}"),
                         doctest::Contains("SOLUTION_INVALID"), Error);
    std::remove(prepared.c_str());
}

TEST_CASE("missing placeholders and failing commands are launch errors") {
    MilpProblem p;
    add_var(p, "x", 0.0, 1.0);
    CHECK_THROWS_WITH_AS(solve_external(p, "true"), doctest::Contains("placeholder"), Error);
    CHECK_THROWS_WITH_AS(solve_external(p, "false {input} {output}"),
                         doctest::Contains("SOLVER_LAUNCH_FAILED"), Error);
}

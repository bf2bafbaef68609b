#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "resilix/rop.hpp"

using namespace resilix;

namespace {

// Generator covers 30 of 50 kW; one 20 kW inverter must run each interval.
MicrogridSpec lean_spec() {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"mt", 5.0, 30.0, 60.0, 0.1, 1.0, 2.0, false}};
    InverterSpec a, b;
    a.name = "wt1";
    a.output_kw = {20.0, 20.0, 20.0};
    b.name = "pv1";
    b.output_kw = {20.0, 20.0, 20.0};
    spec.inverters = {a, b};
    spec.load.critical_kw = {50.0, 50.0, 50.0};
    return spec;
}

// Both inverters needed every interval: DG additions genuinely matter.
MicrogridSpec tight_spec() {
    MicrogridSpec spec = lean_spec();
    spec.generators[0].p_min_kw = 2.0;
    spec.generators[0].p_max_kw = 10.0;
    return spec;
}

EventProfile uniform_event(int horizon, double p) {
    EventProfile event;
    event.stages = {{horizon, {p}}};
    return event;
}

RopConfig base_config(long count, uint64_t seed) {
    RopConfig cfg;
    cfg.scenario_count = count;
    cfg.seed = seed;
    cfg.target_sr = 0.0;
    cfg.max_added_dgs = 0;
    return cfg;
}

}  // namespace

TEST_CASE("enhancement sizes the portable unit to the largest inverter peak") {
    MicrogridSpec spec = lean_spec();
    spec.inverters[0].output_kw = {30.0, 10.0, 5.0};
    spec.inverters[1].output_kw = {45.0, 40.0, 40.0};
    InverterSpec c;
    c.name = "pv2";
    c.output_kw = {40.0, 40.0, 40.0};
    spec.inverters.push_back(c);

    MicrogridSpec enhanced = enhance_with_dg(spec);
    REQUIRE(enhanced.generators.size() == 2);
    const auto& unit = enhanced.generators.back();
    CHECK(unit.p_max_kw == 45.0);
    CHECK(unit.p_min_kw == 0.0);
    CHECK(unit.ramp_kw_per_h == 45.0);
    CHECK(unit.name == "portable_pdg1");
}

TEST_CASE("an explicit template wins over the sizing rule") {
    MicrogridSpec spec = lean_spec();
    GeneratorSpec tmpl;
    tmpl.name = "spare";
    tmpl.p_min_kw = 0.0;
    tmpl.p_max_kw = 80.0;
    tmpl.ramp_kw_per_h = 80.0;
    spec.portable_dg_template = tmpl;
    MicrogridSpec enhanced = enhance_with_dg(spec);
    CHECK(enhanced.generators.back().p_max_kw == 80.0);
    CHECK(enhanced.generators.back().name == "spare_pdg1");
}

TEST_CASE("repeated enhancement appends distinct numbered units") {
    MicrogridSpec spec = lean_spec();
    MicrogridSpec once = enhance_with_dg(spec);
    MicrogridSpec twice = enhance_with_dg(once);
    REQUIRE(twice.generators.size() == 3);
    CHECK(twice.generators[1].name == "portable_pdg1");
    CHECK(twice.generators[2].name == "portable_pdg2");
}

TEST_CASE("enhancement without any capacity reference fails") {
    MicrogridSpec spec;
    spec.interval_hours = 1.0;
    spec.generators = {{"g", 0.0, 5.0, 5.0, 0.0, 0.0, 0.0, false}};
    spec.load.critical_kw = {4.0};
    CHECK_THROWS_WITH_AS(enhance_with_dg(spec), doctest::Contains("NO_CAPACITY_REFERENCE"),
                         Error);
}

TEST_CASE("DG-named generators donate their cost model") {
    MicrogridSpec spec = lean_spec();
    spec.generators.push_back({"DG", 14.0, 80.0, 170.0, 0.16, 2.0, 5.0, false});
    MicrogridSpec enhanced = enhance_with_dg(spec);
    CHECK(enhanced.generators.back().op_cost_per_kwh == 0.16);
    CHECK(enhanced.generators.back().startup_cost == 5.0);
}

TEST_CASE("staged events resolve case labels") {
    auto event = build_staged_event({"C2", "C6", "C2"}, {1, 1, 1}, bundled_failure_cases());
    REQUIRE(event.stages.size() == 3);
    CHECK(event.stages[0].probs == std::vector<double>{0.01});
    CHECK(event.stages[1].probs == std::vector<double>{0.05});
    CHECK(event.stages[2].probs == std::vector<double>{0.01});

    auto uniform = build_staged_event({"C1", "C1", "C1"}, {4, 4, 4}, bundled_failure_cases());
    CHECK(uniform.total_intervals() == 12);
    CHECK(uniform.stages[0].probs == std::vector<double>{0.005});
}

TEST_CASE("the split case carries the per-inverter vector") {
    auto event = build_staged_event({"C3"}, {4}, bundled_failure_cases());
    REQUIRE(event.stages[0].probs.size() == 10);
    for (int i = 0; i < 5; ++i) CHECK(event.stages[0].probs[i] == 0.01);
    for (int i = 5; i < 10; ++i) CHECK(event.stages[0].probs[i] == 0.02);
}

TEST_CASE("unknown case labels are rejected") {
    CHECK_THROWS_WITH_AS(build_staged_event({"C9"}, {1}, bundled_failure_cases()),
                         doctest::Contains("UNKNOWN_CASE_LABEL"), Error);
}

TEST_CASE("run_rop dominates the baseline on a shared set") {
    MicrogridSpec spec = lean_spec();
    RopConfig cfg = base_config(600, 20240601);
    auto report = run_rop(spec, uniform_event(3, 0.03), cfg);
    CHECK(report.mem_feasible);
    CHECK(report.rop_sr >= report.mem_sr);
    CHECK(report.mem_sr < 1.0);
    CHECK(report.enhancement_trace.size() == 1);
    CHECK(report.enhancement_trace[0].added_dg_count == 0);
    CHECK(report.enhancement_trace[0].sr == report.rop_sr);
}

TEST_CASE("run_rop is deterministic") {
    MicrogridSpec spec = lean_spec();
    RopConfig cfg = base_config(400, 7);
    auto a = run_rop(spec, uniform_event(3, 0.02), cfg);
    auto b = run_rop(spec, uniform_event(3, 0.02), cfg);
    CHECK(a.rop_sr == b.rop_sr);
    CHECK(a.mem_sr == b.mem_sr);
    CHECK(a.plan.scenario_success == b.plan.scenario_success);
}

TEST_CASE("a healthy system needs no enhancement") {
    MicrogridSpec spec = tight_spec();
    auto event = build_staged_event({"C1", "C1", "C1"}, {1, 1, 1}, bundled_failure_cases());
    RopConfig cfg = base_config(800, 31);
    cfg.target_sr = 0.95;
    cfg.max_added_dgs = 3;
    auto report = run_rop(spec, event, cfg);
    CHECK(report.enhancement_trace.size() == 1);
    CHECK(report.added_dg_count == 0);
    CHECK(report.rop_sr >= 0.95);
    CHECK(!report.enhancement_exhausted);
}

TEST_CASE("a stressed system adds portable DGs until the target holds") {
    MicrogridSpec spec = tight_spec();
    auto event = build_staged_event({"C2", "C6", "C2"}, {1, 1, 1}, bundled_failure_cases());
    RopConfig cfg = base_config(800, 31);
    cfg.target_sr = 0.95;
    cfg.max_added_dgs = 3;
    auto report = run_rop(spec, event, cfg);
    REQUIRE(report.enhancement_trace.size() >= 2);
    CHECK(report.enhancement_trace[0].sr < 0.95);
    for (size_t k = 1; k < report.enhancement_trace.size(); ++k) {
        CHECK(report.enhancement_trace[k].sr >= report.enhancement_trace[k - 1].sr);
    }
    CHECK(report.rop_sr >= 0.95);
    CHECK(!report.enhancement_exhausted);
    CHECK(report.final_spec.generator_count() ==
          spec.generator_count() + report.added_dg_count);
}

TEST_CASE("an exhausted budget is flagged") {
    MicrogridSpec spec = tight_spec();
    auto event = build_staged_event({"C2", "C6", "C2"}, {1, 1, 1}, bundled_failure_cases());
    RopConfig cfg = base_config(800, 31);
    cfg.target_sr = 1.1;  // unreachable on purpose
    cfg.max_added_dgs = 1;
    auto report = run_rop(spec, event, cfg);
    CHECK(report.enhancement_exhausted);
    CHECK(report.added_dg_count == 1);
}

TEST_CASE("the cost tie-break keeps the SR and trims waste") {
    // Ample capacity: many SR-optimal plans exist; the tie-break must pick
    // one without committing the expensive spare unit.
    MicrogridSpec spec = lean_spec();
    spec.generators.push_back({"spare", 10.0, 60.0, 120.0, 0.9, 5.0, 9.0, false});

    RopConfig plain = base_config(300, 99);
    auto before = run_rop(spec, uniform_event(3, 0.02), plain);

    RopConfig refined = plain;
    refined.cost_tiebreak = true;
    auto after = run_rop(spec, uniform_event(3, 0.02), refined);

    CHECK(after.rop_sr == before.rop_sr);

    auto committed_cost = [&](const RopPlan& plan) {
        double cost = 0.0;
        for (int g = 0; g < spec.generator_count(); ++g) {
            for (int t = 0; t < spec.horizon(); ++t) {
                cost += plan.commitment[g][t]
                            ? spec.interval_hours * spec.generators[g].no_load_cost_per_h
                            : 0.0;
            }
        }
        return cost;
    };
    CHECK(committed_cost(after.plan) <= committed_cost(before.plan));
    // The refined plan never commits the spare unit: the base generator
    // plus one inverter covers every interval.
    for (int t = 0; t < spec.horizon(); ++t) CHECK(after.plan.commitment[1][t] == 0);

    auto again = run_rop(spec, uniform_event(3, 0.02), refined);
    CHECK(again.plan.commitment == after.plan.commitment);
    CHECK(again.plan.scenario_success == after.plan.scenario_success);
}

TEST_CASE("alpha sweep is sorted and non-increasing with pinned endpoints") {
    MicrogridSpec spec = lean_spec();
    RopConfig cfg = base_config(500, 77);
    auto table = alpha_sweep(spec, uniform_event(3, 0.02), {1.0, 0.0, 1.5, 0.6, 1.2}, cfg);
    REQUIRE(table.size() == 5);
    CHECK(table.front().first == 0.0);
    CHECK(table.front().second == 1.0);  // alpha 0 always succeeds
    double prev = 2.0;
    for (const auto& [alpha, sr] : table) {
        (void)alpha;
        CHECK(sr <= prev + 1e-12);
        prev = sr;
    }
    // 1.5 * 50 = 75 exceeds the 70 kW total capacity.
    CHECK(table.back().second == 0.0);
}

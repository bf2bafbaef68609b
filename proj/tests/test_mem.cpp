#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "resilix/mem.hpp"
#include "resilix/model.hpp"

using namespace resilix;

namespace {

// Zero-margin study system: ten flat 10 kW inverters plus one generator
// covering the remaining 40 kW exactly.
MicrogridSpec zero_margin_spec(int horizon) {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"gen", 5.0, 100.0, 100.0, 0.1, 1.0, 5.0, false}};
    for (int i = 0; i < 10; ++i) {
        InverterSpec inv;
        inv.name = "ren" + std::to_string(i);
        inv.output_kw.assign(horizon, 10.0);
        spec.inverters.push_back(inv);
    }
    spec.load.critical_kw.assign(horizon, 140.0);
    return spec;
}

ScenarioSet empirical_set(const MicrogridSpec& spec, double p, long count, uint64_t seed) {
    EventProfile event;
    event.stages = {{spec.horizon(), {p}}};
    return generate_scenario_set(expand_event(event, spec.inverter_count()), count, seed,
                                 ProbabilityMode::Empirical);
}

}  // namespace

TEST_CASE("single generator schedule costs match hand arithmetic") {
    // p_min 10, p_max 100, op 0.1/kWh, no-load 1/h, startup 5; load 50 kW
    // over two 4h intervals: cost = 2*4*(0.1*50 + 1) + 5 = 53.
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"g", 10.0, 100.0, 100.0, 0.1, 1.0, 5.0, false}};
    spec.load.critical_kw = {50.0, 50.0};

    MemSchedule schedule = build_mem_schedule(spec);
    CHECK(schedule.commitment[0][0] == 1);
    CHECK(schedule.commitment[0][1] == 1);
    CHECK(schedule.dispatch[0][0] == doctest::Approx(50.0));
    CHECK(schedule.dispatch[0][1] == doctest::Approx(50.0));
    CHECK(schedule.total_cost == doctest::Approx(53.0));
}

TEST_CASE("initially running generators do not pay startup again") {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"g", 10.0, 100.0, 100.0, 0.1, 1.0, 5.0, true}};
    spec.load.critical_kw = {50.0, 50.0};
    CHECK(build_mem_schedule(spec).total_cost == doctest::Approx(48.0));
}

TEST_CASE("free renewables displace all generation") {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"g", 10.0, 100.0, 100.0, 0.1, 1.0, 5.0, false}};
    InverterSpec inv;
    inv.name = "pv";
    inv.output_kw = {60.0, 60.0};
    spec.inverters = {inv};
    spec.load.critical_kw = {50.0, 50.0};

    MemSchedule schedule = build_mem_schedule(spec);
    CHECK(schedule.total_cost == 0.0);
    CHECK(schedule.commitment[0][0] == 0);
    CHECK(schedule.commitment[0][1] == 0);
    CHECK(schedule.inverter_usage[0][0] == 1);
}

TEST_CASE("unreachable critical load is MEM_INFEASIBLE") {
    MicrogridSpec spec;
    spec.interval_hours = 4.0;
    spec.generators = {{"g", 10.0, 100.0, 100.0, 0.1, 1.0, 5.0, false}};
    spec.load.critical_kw = {50.0, 180.0};
    CHECK_THROWS_WITH_AS(build_mem_schedule(spec), doctest::Contains("MEM_INFEASIBLE"), Error);
}

TEST_CASE("all-zero scenarios score a feasible schedule at one") {
    MicrogridSpec spec = zero_margin_spec(4);
    MemSchedule schedule = build_mem_schedule(spec);
    ScenarioSet set = empirical_set(spec, 0.0, 100, 3);
    auto eval = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::None);
    CHECK(eval.sr == 1.0);
}

TEST_CASE("zero-margin schedule tracks the survival product at one percent") {
    // SR converges to 0.99^30 = 0.7397: failures in the last interval are
    // harmless, so 30 of the 40 cells are exposed.
    MicrogridSpec spec = zero_margin_spec(4);
    MemSchedule schedule = build_mem_schedule(spec);
    CHECK(schedule.dispatch[0][0] == doctest::Approx(40.0));

    ScenarioSet set = empirical_set(spec, 0.01, 4000, 11);
    auto eval = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::None);
    // 3 sigma of a Bernoulli mean over 4000 samples is about 0.021.
    CHECK(std::abs(eval.sr - 0.7397) <= 0.025);
}

TEST_CASE("zero-margin schedule tracks the survival product at five percent") {
    MicrogridSpec spec = zero_margin_spec(4);
    MemSchedule schedule = build_mem_schedule(spec);
    ScenarioSet set = empirical_set(spec, 0.05, 4000, 12);
    auto eval = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::None);
    CHECK(std::abs(eval.sr - 0.2146) <= 0.025);
}

TEST_CASE("flags on unused or zero-output inverters never matter") {
    MicrogridSpec spec = zero_margin_spec(2);
    spec.inverters[0].output_kw = {0.0, 0.0};  // silent unit
    spec.load.critical_kw = {130.0, 130.0};
    MemSchedule schedule = build_mem_schedule(spec);
    CHECK(schedule.inverter_usage[0][0] == 0);

    // A scenario flagging only the silent inverter must behave like the
    // all-zero scenario.
    ScenarioSet set;
    FailureMatrix zero, flagged;
    zero.periods = flagged.periods = 2;
    zero.inverters = flagged.inverters = 10;
    zero.flags.assign(20, 0);
    flagged.flags.assign(20, 0);
    flagged.at(0, 0) = 1;
    set.scenarios = {zero, flagged};
    set.weights = {0.5, 0.5};
    set.occurrences = {1, 1};
    set.sample_count = 2;

    auto eval = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::None);
    CHECK(eval.scenario_success[0] == eval.scenario_success[1]);
    CHECK(eval.sr == 1.0);
}

TEST_CASE("redispatch recourse can only help") {
    MicrogridSpec spec = zero_margin_spec(3);
    // Lower the load so the generator has slack to redispatch into.
    spec.load.critical_kw = {120.0, 120.0, 120.0};
    MemSchedule schedule = build_mem_schedule(spec);
    ScenarioSet set = empirical_set(spec, 0.05, 500, 21);
    auto fixed = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::None);
    auto flex = evaluate_schedule_sr(schedule, spec, set, 1.0, Recourse::Redispatch);
    CHECK(flex.sr >= fixed.sr);
    for (int w = 0; w < set.size(); ++w) {
        CHECK(flex.scenario_success[w] >= fixed.scenario_success[w]);
    }
    // With 20 kW of generator headroom, losing any single inverter is
    // recoverable, so redispatch must strictly improve at this seed.
    CHECK(flex.sr > fixed.sr);
}

TEST_CASE("SR is monotone in alpha") {
    MicrogridSpec spec = zero_margin_spec(3);
    MemSchedule schedule = build_mem_schedule(spec);
    ScenarioSet set = empirical_set(spec, 0.03, 800, 31);
    double prev = 2.0;
    for (double alpha : {0.2, 0.6, 0.9, 1.0, 1.1}) {
        auto eval = evaluate_schedule_sr(schedule, spec, set, alpha, Recourse::None);
        CHECK(eval.sr <= prev + 1e-12);
        prev = eval.sr;
    }
}

TEST_CASE("adding flags to a scenario never helps") {
    MicrogridSpec spec = zero_margin_spec(2);
    MemSchedule schedule = build_mem_schedule(spec);

    ScenarioSet base;
    FailureMatrix m;
    m.periods = 2;
    m.inverters = 10;
    m.flags.assign(20, 0);
    m.at(0, 3) = 1;
    base.scenarios = {m};
    base.weights = {1.0};
    base.occurrences = {1};
    base.sample_count = 1;

    auto before = evaluate_schedule_sr(schedule, spec, base, 1.0, Recourse::None);
    base.scenarios[0].at(0, 7) = 1;
    auto after = evaluate_schedule_sr(schedule, spec, base, 1.0, Recourse::None);
    CHECK(after.sr <= before.sr);
}

#include "resilix/mem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resilix/simplex.hpp"

namespace resilix {

MemSchedule build_mem_schedule(const MicrogridSpec& spec, const SolveBudget& budget) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const int I = spec.inverter_count();
    const double dt = spec.interval_hours;

    MilpProblem p;
    p.name = "mem";
    std::vector<int> u(static_cast<size_t>(G) * T), s(u.size()), pw(u.size());
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            VarInfo commit;
            commit.name = "ug_g" + std::to_string(g) + "_t" + std::to_string(t);
            commit.lower = 0.0;
            commit.upper = 1.0;
            commit.kind = VarKind::Binary;
            commit.family = VarFamily::GenCommit;
            commit.idx = {g, t, -1};
            u[g * T + t] = p.add_variable(commit);
        }
    }
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            VarInfo start;
            start.name = "su_g" + std::to_string(g) + "_t" + std::to_string(t);
            start.lower = 0.0;
            start.upper = 1.0;
            start.kind = VarKind::Continuous;  // tight at any cost optimum
            start.family = VarFamily::GenStartup;
            start.idx = {g, t, -1};
            s[g * T + t] = p.add_variable(start);
        }
    }
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            VarInfo power;
            power.name = "pg_g" + std::to_string(g) + "_t" + std::to_string(t);
            power.lower = 0.0;
            power.upper = spec.generators[g].p_max_kw;
            power.kind = VarKind::Continuous;
            power.family = VarFamily::GenPower;
            power.idx = {g, t, -1};
            pw[g * T + t] = p.add_variable(power);
        }
    }

    // Cost is minimized; the problem objective is always maximized, so
    // every coefficient enters negated.
    for (int g = 0; g < G; ++g) {
        const auto& gen = spec.generators[g];
        for (int t = 0; t < T; ++t) {
            p.objective.push_back({pw[g * T + t], -dt * gen.op_cost_per_kwh});
            p.objective.push_back({u[g * T + t], -dt * gen.no_load_cost_per_h});
            p.objective.push_back({s[g * T + t], -gen.startup_cost});
        }
    }

    auto add = [&](std::string name, std::vector<LinearTerm> terms, Sense sense, double rhs) {
        LinearConstraint c;
        c.name = std::move(name);
        c.terms = std::move(terms);
        c.sense = sense;
        c.rhs = rhs;
        p.add_constraint(std::move(c));
    };

    for (int g = 0; g < G; ++g) {
        const auto& gen = spec.generators[g];
        const double ramp = gen.ramp_kw_per_h * dt;
        for (int t = 0; t < T; ++t) {
            const std::string suffix = "_g" + std::to_string(g) + "_t" + std::to_string(t);
            add("pmin" + suffix, {{u[g * T + t], gen.p_min_kw}, {pw[g * T + t], -1.0}},
                Sense::LessEq, 0.0);
            add("pmax" + suffix, {{pw[g * T + t], 1.0}, {u[g * T + t], -gen.p_max_kw}},
                Sense::LessEq, 0.0);
            if (t >= 1) {
                add("rampup" + suffix, {{pw[g * T + t], 1.0}, {pw[g * T + t - 1], -1.0}},
                    Sense::LessEq, ramp);
                add("rampdn" + suffix, {{pw[g * T + t - 1], 1.0}, {pw[g * T + t], -1.0}},
                    Sense::LessEq, ramp);
                add("start" + suffix,
                    {{u[g * T + t], 1.0}, {u[g * T + t - 1], -1.0}, {s[g * T + t], -1.0}},
                    Sense::LessEq, 0.0);
            } else {
                add("start" + suffix, {{u[g * T + t], 1.0}, {s[g * T + t], -1.0}}, Sense::LessEq,
                    gen.initially_on ? 1.0 : 0.0);
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        double renewable = 0.0;
        for (int i = 0; i < I; ++i) renewable += spec.inverters[i].output_kw[t];
        std::vector<LinearTerm> terms;
        for (int g = 0; g < G; ++g) terms.push_back({pw[g * T + t], 1.0});
        add("demand_t" + std::to_string(t), std::move(terms), Sense::GreaterEq,
            spec.load.critical_kw[t] - renewable);
    }

    MilpSolution solution = solve_bundled(p, budget);
    if (solution.status == SolveStatus::Infeasible) {
        throw Error(ErrorCode::MemInfeasible,
                    "capacity cannot cover the critical load even with all assets");
    }
    if (solution.status == SolveStatus::BudgetExceeded) {
        throw Error(ErrorCode::BudgetExceeded, "MEM commitment solve ran out of budget");
    }

    MemSchedule schedule;
    schedule.commitment.assign(G, std::vector<uint8_t>(T, 0));
    schedule.dispatch.assign(G, std::vector<double>(T, 0.0));
    schedule.inverter_usage.assign(I, std::vector<uint8_t>(T, 0));
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            schedule.commitment[g][t] =
                static_cast<uint8_t>(std::lround(solution.values[u[g * T + t]]));
            double out = solution.values[pw[g * T + t]];
            if (std::abs(out) < 1e-9) out = 0.0;
            schedule.dispatch[g][t] = out;
        }
    }
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            schedule.inverter_usage[i][t] = spec.inverters[i].output_kw[t] > 0.0 ? 1 : 0;
        }
    }
    schedule.total_cost = mem_schedule_cost(spec, schedule);
    return schedule;
}

double mem_schedule_cost(const MicrogridSpec& spec, const MemSchedule& schedule) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const double dt = spec.interval_hours;
    double cost = 0.0;
    for (int g = 0; g < G; ++g) {
        const auto& gen = spec.generators[g];
        bool prev_on = gen.initially_on;
        for (int t = 0; t < T; ++t) {
            const bool on = schedule.commitment[g][t] != 0;
            cost += dt * (gen.op_cost_per_kwh * schedule.dispatch[g][t] +
                          gen.no_load_cost_per_h * (on ? 1.0 : 0.0));
            if (on && !prev_on) cost += gen.startup_cost;
            prev_on = on;
        }
    }
    return cost;
}

namespace {

// Best-case generator margin when outputs may be re-optimized inside the
// fixed commitment: maximize the minimum of net_t - alpha*L_t.
double redispatch_min_margin(const MicrogridSpec& spec, const MemSchedule& schedule,
                             const std::vector<double>& inverter_power, double alpha) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const double dt = spec.interval_hours;

    MilpProblem p;
    p.name = "redispatch";
    std::vector<int> pw(static_cast<size_t>(G) * T);
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            VarInfo var;
            var.name = "pg_g" + std::to_string(g) + "_t" + std::to_string(t);
            const bool on = schedule.commitment[g][t] != 0;
            var.lower = on ? spec.generators[g].p_min_kw : 0.0;
            var.upper = on ? spec.generators[g].p_max_kw : 0.0;
            pw[g * T + t] = p.add_variable(var);
        }
    }
    VarInfo margin;
    margin.name = "margin";
    margin.lower = -std::numeric_limits<double>::infinity();
    margin.upper = std::numeric_limits<double>::infinity();
    const int m = p.add_variable(margin);
    p.objective.push_back({m, 1.0});

    for (int g = 0; g < G; ++g) {
        const double ramp = spec.generators[g].ramp_kw_per_h * dt;
        for (int t = 1; t < T; ++t) {
            p.add_constraint({"rampup_g" + std::to_string(g) + "_t" + std::to_string(t),
                              {{pw[g * T + t], 1.0}, {pw[g * T + t - 1], -1.0}},
                              Sense::LessEq,
                              ramp});
            p.add_constraint({"rampdn_g" + std::to_string(g) + "_t" + std::to_string(t),
                              {{pw[g * T + t - 1], 1.0}, {pw[g * T + t], -1.0}},
                              Sense::LessEq,
                              ramp});
        }
    }
    for (int t = 0; t < T; ++t) {
        std::vector<LinearTerm> terms;
        for (int g = 0; g < G; ++g) terms.push_back({pw[g * T + t], 1.0});
        terms.push_back({m, -1.0});
        p.add_constraint({"margin_t" + std::to_string(t), std::move(terms), Sense::GreaterEq,
                          alpha * spec.load.critical_kw[t] - inverter_power[t]});
    }

    SimplexSolver lp;
    LpResult result = lp.solve(p);
    if (result.status != LpStatus::Optimal) {
        // The scheduled dispatch itself is always feasible, so this only
        // signals a numerically hopeless instance.
        return -std::numeric_limits<double>::infinity();
    }
    return result.objective;
}

}  // namespace

SrEvaluation evaluate_schedule_sr(const MemSchedule& schedule, const MicrogridSpec& spec,
                                  const ScenarioSet& set, double alpha, Recourse recourse) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const int I = spec.inverter_count();
    const int W = set.size();

    SrEvaluation eval;
    eval.scenario_success.assign(W, 0);

    std::vector<uint8_t> available(I);
    std::vector<double> inverter_power(T);
    for (int w = 0; w < W; ++w) {
        const FailureMatrix& flags = set.scenarios[w];
        std::fill(available.begin(), available.end(), 1);
        bool success = true;
        for (int t = 0; t < T; ++t) {
            double inv_sum = 0.0;
            for (int i = 0; i < I; ++i) {
                const bool used = schedule.inverter_usage[i][t] != 0 && available[i] != 0;
                if (used) inv_sum += spec.inverters[i].output_kw[t];
                if (used && flags.at(t, i)) available[i] = 0;
            }
            inverter_power[t] = inv_sum;
            if (recourse == Recourse::None) {
                double net = inv_sum;
                for (int g = 0; g < G; ++g) net += schedule.dispatch[g][t];
                if (net < alpha * spec.load.critical_kw[t] - 1e-9) success = false;
            }
        }
        if (recourse == Recourse::Redispatch) {
            success = redispatch_min_margin(spec, schedule, inverter_power, alpha) >= -1e-9;
        }
        eval.scenario_success[w] = success ? 1 : 0;
        eval.sr += success ? set.weights[w] : 0.0;
    }
    return eval;
}

}  // namespace resilix

#include "resilix/rop_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resilix {

namespace {

std::string tag(const char* base, int a, int b) {
    return std::string(base) + std::to_string(a) + "_t" + std::to_string(b);
}

std::string tag(const char* base, int a, int b, int w) {
    return tag(base, a, b) + "_w" + std::to_string(w);
}

std::string tw(const char* base, int t, int w) {
    return std::string(base) + std::to_string(t) + "_w" + std::to_string(w);
}

}  // namespace

BigM compute_big_m(const MicrogridSpec& spec, double alpha) {
    double gen_cap = 0.0;
    for (const auto& g : spec.generators) gen_cap += g.p_max_kw;
    double inv_cap = 0.0;
    for (const auto& inv : spec.inverters) {
        double peak = 0.0;
        for (double v : inv.output_kw) peak = std::max(peak, v);
        inv_cap += peak;
    }
    double load_peak = 0.0;
    for (double v : spec.load.critical_kw) load_peak = std::max(load_peak, v);

    BigM m;
    m.value = gen_cap + inv_cap + alpha * load_peak;
    m.degenerate = m.value == 0.0;
    return m;
}

MilpProblem build_rop_model(const MicrogridSpec& spec, const ScenarioSet& set, double alpha) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const int I = spec.inverter_count();
    const int W = set.size();

    for (const auto& m : set.scenarios) {
        if (m.periods != T || m.inverters != I) {
            std::ostringstream oss;
            oss << "scenario shape (" << m.periods << ", " << m.inverters
                << ") does not match the microgrid (" << T << ", " << I << ")";
            throw Error(ErrorCode::DimensionMismatch, oss.str());
        }
    }
    if (W == 0) {
        throw Error(ErrorCode::DimensionMismatch, "scenario set is empty");
    }

    const double big_m = compute_big_m(spec, alpha).value;
    double net_cap = 0.0;
    for (const auto& g : spec.generators) net_cap += g.p_max_kw;
    for (const auto& inv : spec.inverters) {
        double peak = 0.0;
        for (double v : inv.output_kw) peak = std::max(peak, v);
        net_cap += peak;
    }

    MilpProblem p;
    p.name = "rop";
    auto binary = [&](std::string name, VarFamily family, int a, int b, int c) {
        VarInfo info;
        info.name = std::move(name);
        info.lower = 0.0;
        info.upper = 1.0;
        info.kind = VarKind::Binary;
        info.family = family;
        info.idx = {a, b, c};
        return p.add_variable(info);
    };
    auto continuous = [&](std::string name, VarFamily family, double lo, double hi, int a, int b,
                          int c) {
        VarInfo info;
        info.name = std::move(name);
        info.lower = lo;
        info.upper = hi;
        info.kind = VarKind::Continuous;
        info.family = family;
        info.idx = {a, b, c};
        return p.add_variable(info);
    };

    // First-stage commitment, then scenario-indexed recourse families.
    std::vector<int> ug(G * T), pg(static_cast<size_t>(G) * T * W);
    std::vector<int> v(static_cast<size_t>(I) * T * W), ui(v.size()), wf(v.size());
    std::vector<int> xt(static_cast<size_t>(T) * W), xs(W), y(xt.size()), pnet(xt.size());

    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            ug[g * T + t] = binary(tag("ug_g", g, t), VarFamily::GenCommit, g, t, -1);
        }
    }
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                pg[(g * T + t) * static_cast<size_t>(W) + w] =
                    continuous(tag("pg_g", g, t, w), VarFamily::GenPower, 0.0,
                               spec.generators[g].p_max_kw, g, t, w);
            }
        }
    }
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                v[(i * T + t) * static_cast<size_t>(W) + w] =
                    binary(tag("v_i", i, t, w), VarFamily::InvUse, i, t, w);
            }
        }
    }
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                ui[(i * T + t) * static_cast<size_t>(W) + w] =
                    binary(tag("ui_i", i, t, w), VarFamily::InvAvail, i, t, w);
            }
        }
    }
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                wf[(i * T + t) * static_cast<size_t>(W) + w] =
                    binary(tag("w_i", i, t, w), VarFamily::InvFailConfirm, i, t, w);
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        for (int w = 0; w < W; ++w) {
            xt[t * W + w] = binary(tw("xt_t", t, w), VarFamily::IntervalSuccess, t, w, -1);
        }
    }
    for (int w = 0; w < W; ++w) {
        VarInfo info;
        info.name = "xs_w" + std::to_string(w);
        info.lower = 0.0;
        info.upper = 1.0;
        info.kind = VarKind::Binary;
        info.family = VarFamily::ScenarioSuccess;
        info.idx = {w, -1, -1};
        xs[w] = p.add_variable(info);
    }
    for (int t = 0; t < T; ++t) {
        for (int w = 0; w < W; ++w) {
            y[t * W + w] = continuous(tw("y_t", t, w), VarFamily::Surplus, 0.0,
                                      std::max(big_m, 0.0), t, w, -1);
        }
    }
    for (int t = 0; t < T; ++t) {
        for (int w = 0; w < W; ++w) {
            pnet[t * W + w] = continuous(tw("pnet_t", t, w), VarFamily::NetPower, 0.0,
                                         net_cap, t, w, -1);
        }
    }

    for (int w = 0; w < W; ++w) {
        p.objective.push_back(LinearTerm{xs[w], set.weights[w]});
    }

    auto add = [&](std::string name, std::vector<LinearTerm> terms, Sense sense, double rhs) {
        LinearConstraint c;
        c.name = std::move(name);
        c.terms = std::move(terms);
        c.sense = sense;
        c.rhs = rhs;
        p.add_constraint(std::move(c));
    };

    const double dt = spec.interval_hours;

    // Output limits: p_min u <= P <= p_max u.
    for (int g = 0; g < G; ++g) {
        const auto& gen = spec.generators[g];
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                const int pvar = pg[(g * T + t) * static_cast<size_t>(W) + w];
                const int uvar = ug[g * T + t];
                add(tag("pmin_g", g, t, w), {{uvar, gen.p_min_kw}, {pvar, -1.0}}, Sense::LessEq,
                    0.0);
                add(tag("pmax_g", g, t, w), {{pvar, 1.0}, {uvar, -gen.p_max_kw}}, Sense::LessEq,
                    0.0);
            }
        }
    }
    // Ramping between consecutive intervals; the pre-horizon output is
    // unconstrained, so the first interval carries no ramp pair.
    for (int g = 0; g < G; ++g) {
        const double ramp = spec.generators[g].ramp_kw_per_h * dt;
        for (int t = 1; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                const int cur = pg[(g * T + t) * static_cast<size_t>(W) + w];
                const int prev = pg[(g * T + t - 1) * static_cast<size_t>(W) + w];
                add(tag("rampup_g", g, t, w), {{cur, 1.0}, {prev, -1.0}}, Sense::LessEq, ramp);
                add(tag("rampdn_g", g, t, w), {{prev, 1.0}, {cur, -1.0}}, Sense::LessEq, ramp);
            }
        }
    }
    // Inverter usage, availability, and confirmed-failure coupling.
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                const size_t k = (i * T + t) * static_cast<size_t>(W) + w;
                const double f = set.scenarios[w].at(t, i) ? 1.0 : 0.0;
                add(tag("use_avail_i", i, t, w), {{v[k], 1.0}, {ui[k], -1.0}}, Sense::LessEq, 0.0);
                add(tag("fail_lb_i", i, t, w), {{v[k], 1.0}, {wf[k], -1.0}}, Sense::LessEq,
                    1.0 - f);
                add(tag("fail_ub_use_i", i, t, w), {{wf[k], 1.0}, {v[k], -1.0}}, Sense::LessEq,
                    0.0);
                add(tag("fail_ub_flag_i", i, t, w), {{wf[k], 1.0}}, Sense::LessEq, f);
            }
        }
    }
    for (int i = 0; i < I; ++i) {
        for (int t = 1; t < T; ++t) {
            for (int w = 0; w < W; ++w) {
                const size_t k = (i * T + t) * static_cast<size_t>(W) + w;
                const size_t kp = (i * T + t - 1) * static_cast<size_t>(W) + w;
                add(tag("avail_mono_i", i, t, w), {{ui[k], 1.0}, {ui[kp], -1.0}}, Sense::LessEq,
                    0.0);
                add(tag("fail_next_i", i, t, w), {{ui[k], 1.0}, {wf[kp], 1.0}}, Sense::LessEq,
                    1.0);
            }
        }
    }
    // All inverters start the event available.
    for (int i = 0; i < I; ++i) {
        for (int w = 0; w < W; ++w) {
            add("avail_init_i" + std::to_string(i) + "_w" + std::to_string(w),
                {{ui[(i * T + 0) * static_cast<size_t>(W) + w], 1.0}}, Sense::Eq, 1.0);
        }
    }
    // Net power accounting and big-M success indicators.
    for (int t = 0; t < T; ++t) {
        const double load = alpha * spec.load.critical_kw[t];
        for (int w = 0; w < W; ++w) {
            std::vector<LinearTerm> net_terms;
            for (int g = 0; g < G; ++g) {
                net_terms.push_back({pg[(g * T + t) * static_cast<size_t>(W) + w], 1.0});
            }
            for (int i = 0; i < I; ++i) {
                const double output = spec.inverters[i].output_kw[t];
                net_terms.push_back({v[(i * T + t) * static_cast<size_t>(W) + w], output});
            }
            net_terms.push_back({pnet[t * W + w], -1.0});
            add(tw("net_t", t, w), std::move(net_terms), Sense::Eq, 0.0);

            add(tw("succ_ub_t", t, w),
                {{y[t * W + w], 1.0}, {pnet[t * W + w], -1.0}, {xt[t * W + w], big_m}},
                Sense::LessEq, big_m - load);
            add(tw("succ_lb_t", t, w),
                {{pnet[t * W + w], 1.0}, {y[t * W + w], -1.0}}, Sense::LessEq, load);
            add(tw("surplus_cap_t", t, w),
                {{y[t * W + w], 1.0}, {xt[t * W + w], -big_m}}, Sense::LessEq, 0.0);
        }
    }
    // Scenario success equals the minimum interval success flag.
    for (int w = 0; w < W; ++w) {
        for (int t = 0; t < T; ++t) {
            add(tw("scen_le_t", t, w), {{xs[w], 1.0}, {xt[t * W + w], -1.0}},
                Sense::LessEq, 0.0);
        }
        std::vector<LinearTerm> terms;
        for (int t = 0; t < T; ++t) terms.push_back({xt[t * W + w], 1.0});
        terms.push_back({xs[w], -1.0});
        add("scen_ge_w" + std::to_string(w), std::move(terms), Sense::LessEq,
            static_cast<double>(T - 1));
    }

    return p;
}

RopVarIndex::RopVarIndex(const MilpProblem& problem) {
    gen_count = 0;
    horizon = 0;
    inverter_count = 0;
    scenario_count = 0;
    for (const auto& var : problem.variables) {
        switch (var.family) {
            case VarFamily::GenCommit:
                gen_count = std::max(gen_count, var.idx[0] + 1);
                horizon = std::max(horizon, var.idx[1] + 1);
                break;
            case VarFamily::InvUse:
                inverter_count = std::max(inverter_count, var.idx[0] + 1);
                break;
            case VarFamily::ScenarioSuccess:
                scenario_count = std::max(scenario_count, var.idx[0] + 1);
                break;
            case VarFamily::IntervalSuccess:
                horizon = std::max(horizon, var.idx[0] + 1);
                break;
            default: break;
        }
    }

    ug_.assign(static_cast<size_t>(gen_count) * horizon, -1);
    pg_.assign(static_cast<size_t>(gen_count) * horizon * scenario_count, -1);
    v_.assign(static_cast<size_t>(inverter_count) * horizon * scenario_count, -1);
    ui_ = v_;
    wf_ = v_;
    xt_.assign(static_cast<size_t>(horizon) * scenario_count, -1);
    xs_.assign(scenario_count, -1);
    y_ = xt_;
    pnet_ = xt_;

    for (int id = 0; id < problem.variable_count(); ++id) {
        const auto& var = problem.variables[id];
        const auto& ix = var.idx;
        switch (var.family) {
            case VarFamily::GenCommit: ug_[ix[0] * horizon + ix[1]] = id; break;
            case VarFamily::GenPower:
                pg_[(ix[0] * horizon + ix[1]) * static_cast<size_t>(scenario_count) + ix[2]] = id;
                break;
            case VarFamily::InvUse:
                v_[(ix[0] * horizon + ix[1]) * static_cast<size_t>(scenario_count) + ix[2]] = id;
                break;
            case VarFamily::InvAvail:
                ui_[(ix[0] * horizon + ix[1]) * static_cast<size_t>(scenario_count) + ix[2]] = id;
                break;
            case VarFamily::InvFailConfirm:
                wf_[(ix[0] * horizon + ix[1]) * static_cast<size_t>(scenario_count) + ix[2]] = id;
                break;
            case VarFamily::IntervalSuccess: xt_[ix[0] * scenario_count + ix[1]] = id; break;
            case VarFamily::ScenarioSuccess: xs_[ix[0]] = id; break;
            case VarFamily::Surplus: y_[ix[0] * scenario_count + ix[1]] = id; break;
            case VarFamily::NetPower: pnet_[ix[0] * scenario_count + ix[1]] = id; break;
            default: break;
        }
    }
}

namespace {

RopPlan extract_plan_impl(const MilpProblem& problem, const MilpSolution& solution,
                          const ScenarioSet& set, bool objective_is_sr) {
    if (!solution.has_incumbent()) {
        throw Error(ErrorCode::InfeasibleSolution, "solution carries no incumbent");
    }
    auto violations = check_solution(problem, solution.values, 1e-6);
    if (!violations.empty()) {
        throw Error(ErrorCode::InfeasibleSolution, violations.front());
    }

    RopVarIndex ix(problem);
    const int G = ix.gen_count;
    const int T = ix.horizon;
    const int I = ix.inverter_count;
    const int W = ix.scenario_count;
    if (W != set.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "scenario set does not match the solved problem");
    }

    const auto& x = solution.values;
    auto bit = [&](int id) { return static_cast<uint8_t>(std::lround(x[id])); };

    RopPlan plan;
    plan.commitment.assign(G, std::vector<uint8_t>(T, 0));
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) plan.commitment[g][t] = bit(ix.gen_commit(g, t));
    }
    plan.dispatch.assign(W, std::vector<std::vector<double>>(G, std::vector<double>(T, 0.0)));
    plan.usage.assign(W, std::vector<std::vector<uint8_t>>(I, std::vector<uint8_t>(T, 0)));
    plan.availability = plan.usage;
    plan.interval_success.assign(W, std::vector<uint8_t>(T, 0));
    plan.scenario_success.assign(W, 0);
    plan.net_power.assign(W, std::vector<double>(T, 0.0));

    for (int w = 0; w < W; ++w) {
        for (int g = 0; g < G; ++g) {
            for (int t = 0; t < T; ++t) plan.dispatch[w][g][t] = x[ix.gen_power(g, t, w)];
        }
        for (int i = 0; i < I; ++i) {
            for (int t = 0; t < T; ++t) {
                plan.usage[w][i][t] = bit(ix.inv_use(i, t, w));
                plan.availability[w][i][t] = bit(ix.inv_avail(i, t, w));
            }
        }
        for (int t = 0; t < T; ++t) {
            plan.interval_success[w][t] = bit(ix.interval_success(t, w));
            plan.net_power[w][t] = x[ix.net_power(t, w)];
        }
        plan.scenario_success[w] = bit(ix.scenario_success(w));
    }

    double sr = 0.0;
    for (int w = 0; w < W; ++w) sr += plan.scenario_success[w] ? set.weights[w] : 0.0;
    plan.sr = sr;
    if (objective_is_sr && std::abs(sr - solution.objective_value) > 1e-6) {
        std::ostringstream oss;
        oss << "recomputed SR " << sr << " does not match objective " << solution.objective_value;
        throw Error(ErrorCode::ObjectiveMismatch, oss.str());
    }
    return plan;
}

}  // namespace

RopPlan extract_plan(const MilpProblem& problem, const MilpSolution& solution,
                     const ScenarioSet& set) {
    return extract_plan_impl(problem, solution, set, true);
}

RopPlan extract_tiebreak_plan(const MilpProblem& problem, const MilpSolution& solution,
                              const ScenarioSet& set) {
    return extract_plan_impl(problem, solution, set, false);
}

MilpProblem build_cost_tiebreak_model(const MicrogridSpec& spec, const ScenarioSet& set,
                                      double alpha, const RopPlan& plan) {
    MilpProblem p = build_rop_model(spec, set, alpha);
    p.name = "rop_cost_tiebreak";
    RopVarIndex ix(p);
    const int G = ix.gen_count;
    const int T = ix.horizon;
    const int W = ix.scenario_count;
    const double dt = spec.interval_hours;

    p.objective.clear();
    for (int g = 0; g < G; ++g) {
        const auto& gen = spec.generators[g];
        for (int t = 0; t < T; ++t) {
            if (gen.no_load_cost_per_h != 0.0) {
                p.objective.push_back({ix.gen_commit(g, t), -dt * gen.no_load_cost_per_h});
            }
            if (gen.op_cost_per_kwh != 0.0) {
                for (int w = 0; w < W; ++w) {
                    p.objective.push_back(
                        {ix.gen_power(g, t, w), -set.weights[w] * dt * gen.op_cost_per_kwh});
                }
            }
        }
    }
    for (int w = 0; w < W; ++w) {
        p.add_constraint({"pin_xs_w" + std::to_string(w),
                          {{ix.scenario_success(w), 1.0}},
                          Sense::Eq,
                          plan.scenario_success[w] ? 1.0 : 0.0});
        for (int t = 0; t < T; ++t) {
            p.add_constraint({tw("pin_xt_t", t, w),
                              {{ix.interval_success(t, w), 1.0}},
                              Sense::Eq,
                              plan.interval_success[w][t] ? 1.0 : 0.0});
        }
    }
    return p;
}

std::vector<std::string> validate_plan(const MicrogridSpec& spec, const ScenarioSet& set,
                                       double alpha, const RopPlan& plan, double tol) {
    std::vector<std::string> out;
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const int I = spec.inverter_count();
    const int W = set.size();
    auto fail = [&](const std::string& msg) { out.push_back(msg); };

    if (static_cast<int>(plan.commitment.size()) != G ||
        static_cast<int>(plan.scenario_success.size()) != W) {
        fail("plan dimensions do not match spec/scenarios");
        return out;
    }

    for (int w = 0; w < W; ++w) {
        const auto& flags = set.scenarios[w];
        for (int g = 0; g < G; ++g) {
            const auto& gen = spec.generators[g];
            const double ramp = gen.ramp_kw_per_h * spec.interval_hours;
            for (int t = 0; t < T; ++t) {
                const double pw = plan.dispatch[w][g][t];
                const double u = plan.commitment[g][t];
                if (pw < gen.p_min_kw * u - tol || pw > gen.p_max_kw * u + tol) {
                    fail("output limit violated at g" + std::to_string(g) + " t" +
                         std::to_string(t) + " w" + std::to_string(w));
                }
                if (t >= 1 && std::abs(pw - plan.dispatch[w][g][t - 1]) > ramp + tol) {
                    fail("ramp limit violated at g" + std::to_string(g) + " t" +
                         std::to_string(t) + " w" + std::to_string(w));
                }
            }
        }
        for (int i = 0; i < I; ++i) {
            if (plan.availability[w][i][0] != 1) {
                fail("inverter i" + std::to_string(i) + " not initially available in w" +
                     std::to_string(w));
            }
            for (int t = 0; t < T; ++t) {
                const uint8_t use = plan.usage[w][i][t];
                const uint8_t avail = plan.availability[w][i][t];
                if (use > avail) {
                    fail("unavailable inverter used at i" + std::to_string(i) + " t" +
                         std::to_string(t) + " w" + std::to_string(w));
                }
                if (t >= 1 && plan.availability[w][i][t] > plan.availability[w][i][t - 1]) {
                    fail("availability increased at i" + std::to_string(i) + " t" +
                         std::to_string(t) + " w" + std::to_string(w));
                }
                const bool confirmed = use == 1 && flags.at(t, i) == 1;
                if (confirmed) {
                    for (int t2 = t + 1; t2 < T; ++t2) {
                        if (plan.availability[w][i][t2] != 0) {
                            fail("used flagged inverter stayed available: i" + std::to_string(i) +
                                 " failed at t" + std::to_string(t) + " w" + std::to_string(w));
                            break;
                        }
                    }
                }
            }
        }
        for (int t = 0; t < T; ++t) {
            double net = 0.0;
            for (int g = 0; g < G; ++g) net += plan.dispatch[w][g][t];
            for (int i = 0; i < I; ++i) {
                net += plan.usage[w][i][t] ? spec.inverters[i].output_kw[t] : 0.0;
            }
            if (std::abs(net - plan.net_power[w][t]) > tol) {
                fail("net power accounting off at t" + std::to_string(t) + " w" +
                     std::to_string(w));
            }
            const double threshold = alpha * spec.load.critical_kw[t];
            if (plan.interval_success[w][t] == 1 && plan.net_power[w][t] < threshold - tol) {
                fail("interval marked successful below threshold at t" + std::to_string(t) +
                     " w" + std::to_string(w));
            }
            if (plan.interval_success[w][t] == 0 && plan.net_power[w][t] > threshold + tol) {
                fail("interval marked failed above threshold at t" + std::to_string(t) + " w" +
                     std::to_string(w));
            }
        }
        uint8_t min_flag = 1;
        for (int t = 0; t < T; ++t) min_flag = std::min(min_flag, plan.interval_success[w][t]);
        if (plan.scenario_success[w] != min_flag) {
            fail("scenario flag differs from the minimum interval flag in w" + std::to_string(w));
        }
    }

    double sr = 0.0;
    for (int w = 0; w < W; ++w) sr += plan.scenario_success[w] ? set.weights[w] : 0.0;
    if (std::abs(sr - plan.sr) > 1e-6) {
        fail("stored SR differs from the weighted scenario flags");
    }
    return out;
}

}  // namespace resilix

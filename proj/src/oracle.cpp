#include "resilix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "resilix/milp.hpp"
#include "resilix/simplex.hpp"

namespace resilix {

namespace {

// Residual generator demand per interval plus the first usage matrix (in
// enumeration order) that produces it.
struct UsageOutcome {
    std::vector<double> residual;
    std::vector<uint32_t> usage_rows;  // bitmask per interval
};

void enumerate_usages(const MicrogridSpec& spec, const FailureMatrix& flags, double alpha, int t,
                      uint32_t available, std::vector<uint32_t>& rows,
                      std::vector<double>& residual, std::vector<UsageOutcome>& outcomes,
                      std::map<std::vector<double>, size_t>& seen) {
    const int I = spec.inverter_count();
    const int T = spec.horizon();
    if (t == T) {
        if (seen.emplace(residual, outcomes.size()).second) {
            outcomes.push_back(UsageOutcome{residual, rows});
        }
        return;
    }
    for (uint32_t mask = 0; mask < (1u << I); ++mask) {
        if ((mask & ~available) != 0) continue;  // only available inverters
        double used_power = 0.0;
        uint32_t next_available = available;
        for (int i = 0; i < I; ++i) {
            if (!(mask & (1u << i))) continue;
            used_power += spec.inverters[i].output_kw[t];
            if (flags.at(t, i)) next_available &= ~(1u << i);
        }
        rows.push_back(mask);
        residual.push_back(std::max(0.0, alpha * spec.load.critical_kw[t] - used_power));
        enumerate_usages(spec, flags, alpha, t + 1, next_available, rows, residual, outcomes,
                         seen);
        rows.pop_back();
        residual.pop_back();
    }
}

// Feasibility of covering `residual` with committed generators under
// output and ramp limits.
bool dispatch_feasible(const MicrogridSpec& spec, uint64_t commit_mask,
                       const std::vector<double>& residual, SimplexSolver& lp,
                       std::map<std::pair<uint64_t, std::vector<double>>, bool>& memo) {
    const auto key = std::make_pair(commit_mask, residual);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    const int G = spec.generator_count();
    const int T = spec.horizon();
    MilpProblem p;
    p.name = "dispatch";
    std::vector<int> pw(static_cast<size_t>(G) * T);
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            const bool on = (commit_mask >> (g * T + t)) & 1;
            VarInfo var;
            var.name = "p" + std::to_string(g) + "_" + std::to_string(t);
            var.lower = on ? spec.generators[g].p_min_kw : 0.0;
            var.upper = on ? spec.generators[g].p_max_kw : 0.0;
            pw[g * T + t] = p.add_variable(var);
        }
    }
    for (int g = 0; g < G; ++g) {
        const double ramp = spec.generators[g].ramp_kw_per_h * spec.interval_hours;
        for (int t = 1; t < T; ++t) {
            p.add_constraint({"ru", {{pw[g * T + t], 1.0}, {pw[g * T + t - 1], -1.0}},
                              Sense::LessEq, ramp});
            p.add_constraint({"rd", {{pw[g * T + t - 1], 1.0}, {pw[g * T + t], -1.0}},
                              Sense::LessEq, ramp});
        }
    }
    for (int t = 0; t < T; ++t) {
        std::vector<LinearTerm> terms;
        for (int g = 0; g < G; ++g) terms.push_back({pw[g * T + t], 1.0});
        p.add_constraint({"d" + std::to_string(t), std::move(terms), Sense::GreaterEq,
                          residual[t]});
    }

    const bool feasible = lp.solve(p).status == LpStatus::Optimal;
    memo.emplace(key, feasible);
    return feasible;
}

}  // namespace

OracleResult brute_force_sr(const MicrogridSpec& spec, const ScenarioSet& set, double alpha,
                            const OracleLimits& limits) {
    const int G = spec.generator_count();
    const int T = spec.horizon();
    const int I = spec.inverter_count();
    const int W = set.size();

    if (G * T > limits.max_gen_cells || I * T > limits.max_inv_cells ||
        W > limits.max_scenarios) {
        std::ostringstream oss;
        oss << "instance (G*T=" << G * T << ", I*T=" << I * T << ", scenarios=" << W
            << ") exceeds oracle guards (" << limits.max_gen_cells << ", "
            << limits.max_inv_cells << ", " << limits.max_scenarios << ")";
        throw Error(ErrorCode::SizeLimitExceeded, oss.str());
    }

    // Usage outcomes per scenario are commitment-independent.
    std::vector<std::vector<UsageOutcome>> outcomes(W);
    for (int w = 0; w < W; ++w) {
        std::vector<uint32_t> rows;
        std::vector<double> residual;
        std::map<std::vector<double>, size_t> seen;
        enumerate_usages(spec, set.scenarios[w], alpha, 0, (1u << I) - 1, rows, residual,
                         outcomes[w], seen);
    }

    SimplexSolver lp;
    std::map<std::pair<uint64_t, std::vector<double>>, bool> memo;

    double best_sr = -1.0;
    uint64_t best_mask = 0;
    std::vector<size_t> best_policy;
    const uint64_t commit_masks = 1ull << (G * T);
    std::vector<size_t> policy(W);

    for (uint64_t mask = 0; mask < commit_masks; ++mask) {
        double sr = 0.0;
        for (int w = 0; w < W; ++w) {
            policy[w] = outcomes[w].size();  // sentinel: no feasible usage
            for (size_t k = 0; k < outcomes[w].size(); ++k) {
                if (dispatch_feasible(spec, mask, outcomes[w][k].residual, lp, memo)) {
                    policy[w] = k;
                    break;
                }
            }
            sr += policy[w] < outcomes[w].size() ? set.weights[w] : 0.0;
        }
        if (sr > best_sr) {
            best_sr = sr;
            best_mask = mask;
            best_policy = policy;
            if (sr >= 1.0) break;
        }
    }

    OracleResult result;
    result.sr = best_sr;
    result.best_commitment.assign(G, std::vector<uint8_t>(T, 0));
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            result.best_commitment[g][t] = (best_mask >> (g * T + t)) & 1;
        }
    }
    result.per_scenario_success.assign(W, 0);
    result.per_scenario_policies.assign(
        W, std::vector<std::vector<uint8_t>>(I, std::vector<uint8_t>(T, 0)));
    for (int w = 0; w < W; ++w) {
        if (best_policy[w] >= outcomes[w].size()) continue;
        result.per_scenario_success[w] = 1;
        const auto& rows = outcomes[w][best_policy[w]].usage_rows;
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < I; ++i) {
                result.per_scenario_policies[w][i][t] = (rows[t] >> i) & 1;
            }
        }
    }
    return result;
}

}  // namespace resilix

#include "resilix/scenario.hpp"

#include <cmath>
#include <string_view>
#include <unordered_map>

namespace resilix {

int FailureMatrix::total_flags() const {
    int n = 0;
    for (uint8_t f : flags) n += f;
    return n;
}

int FailureMatrix::distinct_failed_inverters() const {
    int n = 0;
    for (int i = 0; i < inverters; ++i) {
        for (int t = 0; t < periods; ++t) {
            if (at(t, i)) {
                ++n;
                break;
            }
        }
    }
    return n;
}

const char* probability_mode_name(ProbabilityMode mode) {
    return mode == ProbabilityMode::Empirical ? "empirical" : "analytic";
}

std::optional<ProbabilityMode> probability_mode_from_name(const std::string& name) {
    if (name == "empirical") return ProbabilityMode::Empirical;
    if (name == "analytic") return ProbabilityMode::Analytic;
    return std::nullopt;
}

FailureMatrix sample_failure_matrix(const ProbabilityMatrix& p, SplitMix64& rng) {
    FailureMatrix m;
    m.periods = p.periods;
    m.inverters = p.inverters;
    m.flags.assign(static_cast<size_t>(p.periods) * p.inverters, 0);
    for (int t = 0; t < p.periods; ++t) {
        for (int i = 0; i < p.inverters; ++i) {
            const double x = rng.next_uniform();
            m.at(t, i) = x <= p.at(t, i) ? 1 : 0;
        }
    }
    return m;
}

namespace {

struct MatrixKeyHash {
    size_t operator()(const std::string_view& key) const {
        return std::hash<std::string_view>{}(key);
    }
};

}  // namespace

ScenarioSet generate_scenario_set(const ProbabilityMatrix& p, long count,
                                  std::optional<uint64_t> seed, ProbabilityMode mode) {
    if (!seed) {
        throw Error(ErrorCode::SeedRequired, "scenario generation requires an explicit seed");
    }
    if (count < 1) {
        throw Error(ErrorCode::RangeViolation, "scenario count must be >= 1");
    }

    ScenarioSet set;
    set.sample_count = count;
    set.seed = *seed;
    set.probability_mode = mode;

    std::unordered_map<std::string, size_t> index_of;
    index_of.reserve(static_cast<size_t>(count) * 2);

    for (long k = 0; k < count; ++k) {
        auto rng = SplitMix64::for_sample(*seed, static_cast<uint64_t>(k));
        FailureMatrix m = sample_failure_matrix(p, rng);
        std::string key(reinterpret_cast<const char*>(m.flags.data()), m.flags.size());
        auto [it, inserted] = index_of.emplace(std::move(key), set.scenarios.size());
        if (inserted) {
            set.scenarios.push_back(std::move(m));
            set.occurrences.push_back(1);
        } else {
            ++set.occurrences[it->second];
        }
    }

    set.weights.resize(set.scenarios.size());
    if (mode == ProbabilityMode::Empirical) {
        for (size_t s = 0; s < set.scenarios.size(); ++s) {
            set.weights[s] = static_cast<double>(set.occurrences[s]) / static_cast<double>(count);
        }
    } else {
        double total = 0.0;
        for (size_t s = 0; s < set.scenarios.size(); ++s) {
            const FailureMatrix& m = set.scenarios[s];
            double prod = 1.0;
            for (int t = 0; t < m.periods; ++t) {
                for (int i = 0; i < m.inverters; ++i) {
                    const double q = p.at(t, i);
                    prod *= m.at(t, i) ? q : 1.0 - q;
                }
            }
            set.weights[s] = prod;
            total += prod;
        }
        for (double& w : set.weights) w /= total;
    }
    return set;
}

FailureHistogram failure_count_histogram(const ScenarioSet& set) {
    FailureHistogram h;
    for (size_t s = 0; s < set.scenarios.size(); ++s) {
        const auto& m = set.scenarios[s];
        auto& total_bin = h.by_total_flags[m.total_flags()];
        total_bin.raw += set.occurrences[s];
        total_bin.weighted += set.weights[s];
        auto& distinct_bin = h.by_distinct_inverters[m.distinct_failed_inverters()];
        distinct_bin.raw += set.occurrences[s];
        distinct_bin.weighted += set.weights[s];
    }
    return h;
}

}  // namespace resilix

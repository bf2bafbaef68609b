#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "resilix/model.hpp"

namespace resilix {

// SplitMix64 stream. Sample k of a run draws from a stream derived from
// (seed, k), so generation order is independent of any partitioning.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    static SplitMix64 for_sample(uint64_t seed, uint64_t sample_index) {
        return SplitMix64(seed ^ ((sample_index + 1) * 0x9E3779B97F4A7C15ull));
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw on (0, 1]; a draw of X with flag = (X <= p) then fires
    // with probability exactly p at both endpoints.
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

  private:
    uint64_t state_;
};

// Predestined failures: flag (t, i) = 1 means inverter i fails at the end
// of interval t if it was used during t.
struct FailureMatrix {
    int periods = 0;
    int inverters = 0;
    std::vector<uint8_t> flags;  // row-major, periods x inverters

    uint8_t at(int t, int i) const { return flags[static_cast<size_t>(t) * inverters + i]; }
    uint8_t& at(int t, int i) { return flags[static_cast<size_t>(t) * inverters + i]; }

    int total_flags() const;
    int distinct_failed_inverters() const;

    bool operator==(const FailureMatrix& other) const {
        return periods == other.periods && inverters == other.inverters && flags == other.flags;
    }
};

enum class ProbabilityMode { Empirical, Analytic };

const char* probability_mode_name(ProbabilityMode mode);
std::optional<ProbabilityMode> probability_mode_from_name(const std::string& name);

// Weighted distinct failure scenarios. Weights sum to 1; occurrences count
// the raw draws collapsed into each distinct matrix and sum to sample_count.
struct ScenarioSet {
    std::vector<FailureMatrix> scenarios;
    std::vector<double> weights;
    std::vector<long> occurrences;
    long sample_count = 0;
    uint64_t seed = 0;
    ProbabilityMode probability_mode = ProbabilityMode::Empirical;

    int size() const { return static_cast<int>(scenarios.size()); }
};

// One Bernoulli draw per cell, row-major (t outer, i inner).
FailureMatrix sample_failure_matrix(const ProbabilityMatrix& p, SplitMix64& rng);

// Draws `count` matrices with per-sample derived streams, deduplicates,
// and weights the distinct set. Bit-identical across runs for equal
// (p, count, seed, mode). A missing seed is an error: reproducibility is
// part of the contract.
ScenarioSet generate_scenario_set(const ProbabilityMatrix& p, long count,
                                  std::optional<uint64_t> seed, ProbabilityMode mode);

struct HistogramBin {
    long raw = 0;
    double weighted = 0.0;
};

struct FailureHistogram {
    std::map<int, HistogramBin> by_total_flags;
    std::map<int, HistogramBin> by_distinct_inverters;
};

FailureHistogram failure_count_histogram(const ScenarioSet& set);

}  // namespace resilix

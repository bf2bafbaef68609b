#pragma once

#include <vector>

#include "resilix/milp.hpp"

namespace resilix {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> values;  // structural variables only
    long iterations = 0;
};

// Dense bounded-variable primal simplex with a composite phase 1.
// Integrality is ignored: binaries are relaxed to their bounds. Degeneracy
// is handled by falling back to Bland's rule after a run of degenerate
// pivots. Deterministic for equal inputs.
class SimplexSolver {
  public:
    // lower/upper, when non-empty, override the problem's variable bounds
    // (used by branch-and-bound node fixing). Sizes must match the
    // structural variable count.
    LpResult solve(const MilpProblem& problem, const std::vector<double>& lower = {},
                   const std::vector<double>& upper = {});

  private:
    enum class ColState : uint8_t { Basic, AtLower, AtUpper, Free };

    int rows_ = 0;
    int structurals_ = 0;
    int cols_ = 0;  // structurals + one slack per row

    std::vector<double> tab_;      // rows_ x cols_, row-major
    std::vector<double> lb_, ub_;  // per column
    std::vector<double> xb_;       // value of the basic variable per row
    std::vector<int> basic_;       // column basic in each row
    std::vector<ColState> state_;
    std::vector<double> obj_;    // per-column objective coefficients
    std::vector<double> dj_;     // reduced costs (phase 2)
    std::vector<double> work_;   // per-column scratch (phase 1 pricing)
    long iterations_ = 0;

    double nonbasic_value(int j) const;
    void load(const MilpProblem& problem, const std::vector<double>& lower,
              const std::vector<double>& upper);
    bool run_phase1();
    LpStatus run_phase2();
    void pivot(int row, int col);
    void compute_reduced_costs();
    double infeasibility() const;
};

}  // namespace resilix

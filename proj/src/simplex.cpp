#include "resilix/simplex.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace resilix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kStepTol = 1e-11;
constexpr int kDegenerateLimit = 60;
constexpr int kRecomputeEvery = 256;

struct RatioStep {
    double delta = kInf;
    int row = -1;  // -1: entering flips to its opposite bound; -2: unbounded
    double leave_at = 0.0;
};

}  // namespace

double SimplexSolver::nonbasic_value(int j) const {
    switch (state_[j]) {
        case ColState::AtLower: return lb_[j];
        case ColState::AtUpper: return ub_[j];
        default: return 0.0;  // Free nonbasic rests at zero
    }
}

void SimplexSolver::load(const MilpProblem& problem, const std::vector<double>& lower,
                         const std::vector<double>& upper) {
    rows_ = problem.constraint_count();
    structurals_ = problem.variable_count();
    cols_ = structurals_ + rows_;
    iterations_ = 0;

    tab_.assign(static_cast<size_t>(rows_) * cols_, 0.0);
    lb_.resize(cols_);
    ub_.resize(cols_);
    obj_.assign(cols_, 0.0);
    state_.assign(cols_, ColState::AtLower);
    basic_.resize(rows_);
    xb_.assign(rows_, 0.0);

    for (int j = 0; j < structurals_; ++j) {
        lb_[j] = lower.empty() ? problem.variables[j].lower : lower[j];
        ub_[j] = upper.empty() ? problem.variables[j].upper : upper[j];
        if (lb_[j] > -kInf) {
            state_[j] = ColState::AtLower;
        } else if (ub_[j] < kInf) {
            state_[j] = ColState::AtUpper;
        } else {
            state_[j] = ColState::Free;
        }
    }
    // Crash rule: a variable pinned by a singleton equality row starts at
    // the bound nearest its pinned value, which typically leaves the
    // all-slack basis feasible and skips phase 1.
    for (const auto& c : problem.constraints) {
        if (c.sense != Sense::Eq || c.terms.size() != 1) continue;
        const int j = c.terms[0].var;
        if (c.terms[0].coef == 0.0 || state_[j] == ColState::Free) continue;
        const double pinned = c.rhs / c.terms[0].coef;
        if (lb_[j] > -kInf && ub_[j] < kInf) {
            state_[j] = std::abs(ub_[j] - pinned) < std::abs(lb_[j] - pinned)
                            ? ColState::AtUpper
                            : ColState::AtLower;
        }
    }
    for (const auto& term : problem.objective) obj_[term.var] += term.coef;

    for (int i = 0; i < rows_; ++i) {
        const auto& c = problem.constraints[i];
        double* row = &tab_[static_cast<size_t>(i) * cols_];
        for (const auto& term : c.terms) row[term.var] += term.coef;
        const int slack = structurals_ + i;
        row[slack] = 1.0;
        switch (c.sense) {
            case Sense::LessEq:
                lb_[slack] = 0.0;
                ub_[slack] = kInf;
                break;
            case Sense::GreaterEq:
                lb_[slack] = -kInf;
                ub_[slack] = 0.0;
                break;
            case Sense::Eq:
                lb_[slack] = 0.0;
                ub_[slack] = 0.0;
                break;
        }
        basic_[i] = slack;
        state_[slack] = ColState::Basic;

        double value = c.rhs;
        for (const auto& term : c.terms) value -= term.coef * nonbasic_value(term.var);
        xb_[i] = value;
    }
}

double SimplexSolver::infeasibility() const {
    double total = 0.0;
    for (int i = 0; i < rows_; ++i) {
        const int j = basic_[i];
        if (xb_[i] > ub_[j]) total += xb_[i] - ub_[j];
        if (xb_[i] < lb_[j]) total += lb_[j] - xb_[i];
    }
    return total;
}

void SimplexSolver::pivot(int row, int col) {
    double* prow = &tab_[static_cast<size_t>(row) * cols_];
    const double piv = prow[col];
    const double inv = 1.0 / piv;
    for (int j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[col] = 1.0;

    for (int i = 0; i < rows_; ++i) {
        if (i == row) continue;
        double* r = &tab_[static_cast<size_t>(i) * cols_];
        const double f = r[col];
        if (f == 0.0) continue;
        for (int j = 0; j < cols_; ++j) r[j] -= f * prow[j];
        r[col] = 0.0;
    }
}

void SimplexSolver::compute_reduced_costs() {
    dj_ = obj_;
    for (int i = 0; i < rows_; ++i) {
        const double y = obj_[basic_[i]];
        if (y == 0.0) continue;
        const double* row = &tab_[static_cast<size_t>(i) * cols_];
        for (int j = 0; j < cols_; ++j) dj_[j] -= y * row[j];
    }
    for (int i = 0; i < rows_; ++i) dj_[basic_[i]] = 0.0;
}

bool SimplexSolver::run_phase1() {
    std::vector<int8_t> sigma(rows_, 0);
    int degenerate_run = 0;
    const long limit = 2000 + 200L * (rows_ + structurals_);

    while (true) {
        if (++iterations_ > limit) return false;

        bool any_infeasible = false;
        for (int i = 0; i < rows_; ++i) {
            const int j = basic_[i];
            if (xb_[i] > ub_[j] + kFeasTol) {
                sigma[i] = 1;
                any_infeasible = true;
            } else if (xb_[i] < lb_[j] - kFeasTol) {
                sigma[i] = -1;
                any_infeasible = true;
            } else {
                sigma[i] = 0;
            }
        }
        if (!any_infeasible) return true;

        // d1_j = sum_i sigma_i T_ij; raising x_j reduces total
        // infeasibility iff d1_j > 0, lowering it iff d1_j < 0.
        work_.assign(cols_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            if (sigma[i] == 0) continue;
            const double* row = &tab_[static_cast<size_t>(i) * cols_];
            const double s = sigma[i];
            for (int j = 0; j < cols_; ++j) work_[j] += s * row[j];
        }

        const bool bland = degenerate_run > kDegenerateLimit;
        int enter = -1;
        int dir = 0;
        double best_score = kDualTol;
        for (int j = 0; j < cols_; ++j) {
            if (state_[j] == ColState::Basic) continue;
            if (lb_[j] == ub_[j]) continue;  // fixed
            const double d = work_[j];
            double score = 0.0;
            int cand_dir = 0;
            if ((state_[j] == ColState::AtLower || state_[j] == ColState::Free) && d > kDualTol) {
                score = d;
                cand_dir = 1;
            } else if ((state_[j] == ColState::AtUpper || state_[j] == ColState::Free) &&
                       d < -kDualTol) {
                score = -d;
                cand_dir = -1;
            }
            if (cand_dir == 0) continue;
            if (bland) {
                enter = j;
                dir = cand_dir;
                break;
            }
            if (score > best_score) {
                best_score = score;
                enter = j;
                dir = cand_dir;
            }
        }
        if (enter < 0) return infeasibility() <= kFeasTol * rows_ + kFeasTol;

        // Ratio test: feasible basics block at the bound they would leave,
        // infeasible basics block at the bound they are violating.
        RatioStep best;
        best.delta = kInf;
        best.row = -2;
        double best_piv = 0.0;
        if (lb_[enter] > -kInf && ub_[enter] < kInf) {
            best.delta = ub_[enter] - lb_[enter];
            best.row = -1;
            best_piv = kInf;
        }
        for (int i = 0; i < rows_; ++i) {
            const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
            if (std::abs(a) <= kPivotTol) continue;
            const double rate = -dir * a;  // d xb_i / d delta
            const int bj = basic_[i];
            double bound = 0.0;
            bool blocks = false;
            if (sigma[i] == -1) {
                if (rate > 0.0) {
                    bound = lb_[bj];
                    blocks = true;
                }
            } else if (sigma[i] == 1) {
                if (rate < 0.0) {
                    bound = ub_[bj];
                    blocks = true;
                }
            } else {
                if (rate > 0.0 && ub_[bj] < kInf) {
                    bound = ub_[bj];
                    blocks = true;
                } else if (rate < 0.0 && lb_[bj] > -kInf) {
                    bound = lb_[bj];
                    blocks = true;
                }
            }
            if (!blocks) continue;
            double delta = (bound - xb_[i]) / rate;
            if (delta < 0.0) delta = 0.0;
            const bool better =
                delta < best.delta - kStepTol ||
                (delta <= best.delta + kStepTol &&
                 (bland ? (best.row >= 0 && bj < basic_[best.row]) : std::abs(a) > best_piv));
            if (better) {
                best.delta = delta;
                best.row = i;
                best.leave_at = bound;
                best_piv = std::abs(a);
            }
        }
        if (best.row == -2) {
            // No block: pricing guaranteed an improving direction, so an
            // infeasible basic must block eventually; reaching here means
            // numerics degraded beyond repair.
            return false;
        }

        degenerate_run = best.delta <= kStepTol ? degenerate_run + 1 : 0;

        if (best.row == -1) {
            const double span = dir * best.delta;
            for (int i = 0; i < rows_; ++i) {
                const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
                if (a != 0.0) xb_[i] -= a * span;
            }
            state_[enter] = dir > 0 ? ColState::AtUpper : ColState::AtLower;
            continue;
        }

        const double enter_value = nonbasic_value(enter) + dir * best.delta;
        for (int i = 0; i < rows_; ++i) {
            const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
            if (a != 0.0) xb_[i] -= dir * best.delta * a;
        }
        const int leave = basic_[best.row];
        state_[leave] = best.leave_at == lb_[leave] ? ColState::AtLower : ColState::AtUpper;
        xb_[best.row] = enter_value;
        basic_[best.row] = enter;
        state_[enter] = ColState::Basic;
        pivot(best.row, enter);
    }
}

LpStatus SimplexSolver::run_phase2() {
    compute_reduced_costs();
    int degenerate_run = 0;
    int since_recompute = 0;
    const long limit = 2000 + 200L * (rows_ + structurals_);

    while (true) {
        if (++iterations_ > limit) return LpStatus::IterationLimit;
        if (++since_recompute >= kRecomputeEvery) {
            compute_reduced_costs();
            since_recompute = 0;
        }

        const bool bland = degenerate_run > kDegenerateLimit;
        int enter = -1;
        int dir = 0;
        double best_score = kDualTol;
        for (int j = 0; j < cols_; ++j) {
            if (state_[j] == ColState::Basic) continue;
            if (lb_[j] == ub_[j]) continue;
            const double d = dj_[j];
            double score = 0.0;
            int cand_dir = 0;
            if ((state_[j] == ColState::AtLower || state_[j] == ColState::Free) && d > kDualTol) {
                score = d;
                cand_dir = 1;
            } else if ((state_[j] == ColState::AtUpper || state_[j] == ColState::Free) &&
                       d < -kDualTol) {
                score = -d;
                cand_dir = -1;
            }
            if (cand_dir == 0) continue;
            if (bland) {
                enter = j;
                dir = cand_dir;
                break;
            }
            if (score > best_score) {
                best_score = score;
                enter = j;
                dir = cand_dir;
            }
        }
        if (enter < 0) {
            // Guard against reduced-cost drift before declaring optimality.
            if (since_recompute != 0) {
                compute_reduced_costs();
                since_recompute = 0;
                bool improving = false;
                for (int j = 0; j < cols_ && !improving; ++j) {
                    if (state_[j] == ColState::Basic || lb_[j] == ub_[j]) continue;
                    if ((state_[j] == ColState::AtLower || state_[j] == ColState::Free) &&
                        dj_[j] > kDualTol)
                        improving = true;
                    if ((state_[j] == ColState::AtUpper || state_[j] == ColState::Free) &&
                        dj_[j] < -kDualTol)
                        improving = true;
                }
                if (improving) continue;
            }
            return LpStatus::Optimal;
        }

        RatioStep best;
        best.delta = kInf;
        best.row = -2;
        double best_piv = 0.0;
        if (lb_[enter] > -kInf && ub_[enter] < kInf) {
            best.delta = ub_[enter] - lb_[enter];
            best.row = -1;
            best_piv = kInf;
        }
        for (int i = 0; i < rows_; ++i) {
            const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
            if (std::abs(a) <= kPivotTol) continue;
            const double rate = -dir * a;
            const int bj = basic_[i];
            double bound;
            if (rate > 0.0) {
                if (ub_[bj] >= kInf) continue;
                bound = ub_[bj];
            } else {
                if (lb_[bj] <= -kInf) continue;
                bound = lb_[bj];
            }
            double delta = (bound - xb_[i]) / rate;
            if (delta < 0.0) delta = 0.0;
            const bool better =
                delta < best.delta - kStepTol ||
                (delta <= best.delta + kStepTol &&
                 (bland ? (best.row >= 0 && bj < basic_[best.row]) : std::abs(a) > best_piv));
            if (better) {
                best.delta = delta;
                best.row = i;
                best.leave_at = bound;
                best_piv = std::abs(a);
            }
        }
        if (best.row == -2) return LpStatus::Unbounded;

        degenerate_run = best.delta <= kStepTol ? degenerate_run + 1 : 0;

        if (best.row == -1) {
            const double span = dir * best.delta;
            for (int i = 0; i < rows_; ++i) {
                const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
                if (a != 0.0) xb_[i] -= a * span;
            }
            state_[enter] = dir > 0 ? ColState::AtUpper : ColState::AtLower;
            continue;
        }

        const double enter_value = nonbasic_value(enter) + dir * best.delta;
        for (int i = 0; i < rows_; ++i) {
            const double a = tab_[static_cast<size_t>(i) * cols_ + enter];
            if (a != 0.0) xb_[i] -= dir * best.delta * a;
        }
        const int leave = basic_[best.row];
        state_[leave] = best.leave_at == lb_[leave] ? ColState::AtLower : ColState::AtUpper;
        xb_[best.row] = enter_value;
        basic_[best.row] = enter;
        state_[enter] = ColState::Basic;

        const double de = dj_[enter];
        pivot(best.row, enter);
        const double* prow = &tab_[static_cast<size_t>(best.row) * cols_];
        if (de != 0.0) {
            for (int j = 0; j < cols_; ++j) dj_[j] -= de * prow[j];
        }
        dj_[enter] = 0.0;
    }
}

LpResult SimplexSolver::solve(const MilpProblem& problem, const std::vector<double>& lower,
                              const std::vector<double>& upper) {
    load(problem, lower, upper);

    LpResult result;
    if (!run_phase1()) {
        result.status = LpStatus::Infeasible;
        result.iterations = iterations_;
        return result;
    }
    result.status = run_phase2();
    result.iterations = iterations_;
    if (result.status != LpStatus::Optimal) return result;

    result.values.assign(structurals_, 0.0);
    for (int j = 0; j < structurals_; ++j) {
        result.values[j] = state_[j] == ColState::Basic ? 0.0 : nonbasic_value(j);
    }
    for (int i = 0; i < rows_; ++i) {
        if (basic_[i] < structurals_) result.values[basic_[i]] = xb_[i];
    }
    double objective = 0.0;
    for (int j = 0; j < structurals_; ++j) objective += obj_[j] * result.values[j];
    result.objective = objective;
    return result;
}

}  // namespace resilix

#include "resilix/milp.hpp"

#include <cmath>
#include <sstream>

namespace resilix {

double MilpProblem::objective_value(const std::vector<double>& values) const {
    double total = 0.0;
    for (const auto& term : objective) {
        double x = values[term.var];
        if (variables[term.var].kind == VarKind::Binary) x = std::round(x);
        total += term.coef * x;
    }
    return total;
}

std::vector<std::string> check_solution(const MilpProblem& problem,
                                        const std::vector<double>& values, double tol) {
    std::vector<std::string> violations;
    if (values.size() != problem.variables.size()) {
        violations.push_back("value vector has wrong length");
        return violations;
    }

    for (size_t j = 0; j < problem.variables.size(); ++j) {
        const auto& v = problem.variables[j];
        const double x = values[j];
        if (!std::isfinite(x)) {
            violations.push_back("variable " + v.name + " is not finite");
            continue;
        }
        if (x < v.lower - tol || x > v.upper + tol) {
            std::ostringstream oss;
            oss << "variable " << v.name << " = " << x << " outside bounds [" << v.lower << ", "
                << v.upper << "]";
            violations.push_back(oss.str());
        }
        if (v.kind == VarKind::Binary && std::abs(x - std::round(x)) > tol) {
            std::ostringstream oss;
            oss << "binary variable " << v.name << " = " << x << " is fractional";
            violations.push_back(oss.str());
        }
    }

    for (const auto& c : problem.constraints) {
        double lhs = 0.0;
        for (const auto& term : c.terms) lhs += term.coef * values[term.var];
        bool ok = true;
        switch (c.sense) {
            case Sense::LessEq: ok = lhs <= c.rhs + tol; break;
            case Sense::Eq: ok = std::abs(lhs - c.rhs) <= tol; break;
            case Sense::GreaterEq: ok = lhs >= c.rhs - tol; break;
        }
        if (!ok) {
            std::ostringstream oss;
            oss << "constraint " << c.name << " violated: lhs = " << lhs << ", rhs = " << c.rhs;
            violations.push_back(oss.str());
        }
    }
    return violations;
}

}  // namespace resilix

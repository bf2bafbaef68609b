#pragma once

#include <string>
#include <vector>

#include "resilix/milp.hpp"
#include "resilix/solver.hpp"

namespace resilix {

// Emits the problem in the standard LP text format (objective, subject-to,
// bounds, binary sections). Byte-stable for equal inputs.
std::string write_lp_text(const MilpProblem& problem);

// Parses LP text back into a problem. Accepts the subset of the format
// write_lp_text emits plus common variations (optional labels, minimize
// objectives, free/fixed bound lines). Variables appear in first-use order.
MilpProblem parse_lp_text(const std::string& text);

// Solution files: "name value" lines, '#' comments, optional "=obj=" line.
std::string write_solution_text(const MilpProblem& problem, const MilpSolution& solution);
std::vector<double> parse_solution_text(const MilpProblem& problem, const std::string& text);

}  // namespace resilix

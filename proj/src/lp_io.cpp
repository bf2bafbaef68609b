#include "resilix/lp_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace resilix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

void append_terms(std::string& out, const std::vector<LinearTerm>& terms,
                  const std::vector<VarInfo>& variables) {
    bool any = false;
    for (const auto& term : terms) {
        if (term.coef == 0.0) continue;
        any = true;
        const double mag = std::abs(term.coef);
        out += term.coef < 0.0 ? " -" : " +";
        if (mag != 1.0) {
            out += ' ';
            out += format_number(mag);
        }
        out += ' ';
        out += variables[term.var].name;
    }
    if (!any) out += " 0";
}

}  // namespace

std::string write_lp_text(const MilpProblem& problem) {
    std::string out;
    out += "\\ ";
    out += problem.name.empty() ? std::string("problem") : problem.name;
    out += "\nMaximize\n obj:";
    append_terms(out, problem.objective, problem.variables);
    out += "\nSubject To\n";
    for (size_t i = 0; i < problem.constraints.size(); ++i) {
        const auto& c = problem.constraints[i];
        out += ' ';
        out += c.name.empty() ? "c" + std::to_string(i) : c.name;
        out += ':';
        append_terms(out, c.terms, problem.variables);
        switch (c.sense) {
            case Sense::LessEq: out += " <= "; break;
            case Sense::Eq: out += " = "; break;
            case Sense::GreaterEq: out += " >= "; break;
        }
        out += format_number(c.rhs);
        out += '\n';
    }
    out += "Bounds\n";
    for (const auto& v : problem.variables) {
        if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
        out += ' ';
        if (v.lower == v.upper) {
            out += v.name + " = " + format_number(v.lower);
        } else if (v.lower <= -kInf && v.upper >= kInf) {
            out += v.name + " free";
        } else if (v.lower <= -kInf) {
            out += v.name + " <= " + format_number(v.upper);
        } else if (v.upper >= kInf) {
            out += v.name + " >= " + format_number(v.lower);
        } else {
            out += format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper);
        }
        out += '\n';
    }
    bool any_binary = false;
    for (const auto& v : problem.variables) any_binary |= v.kind == VarKind::Binary;
    if (any_binary) {
        out += "Binary\n";
        for (const auto& v : problem.variables) {
            if (v.kind == VarKind::Binary) {
                out += ' ';
                out += v.name;
                out += '\n';
            }
        }
    }
    out += "End\n";
    return out;
}

namespace {

struct Token {
    enum class Kind { Name, Number, Op, EndOfInput } kind = Kind::EndOfInput;
    std::string text;
    double number = 0.0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    const Token& peek() {
        if (!has_peek_) {
            peeked_ = scan();
            has_peek_ = true;
        }
        return peeked_;
    }

    Token next() {
        if (has_peek_) {
            has_peek_ = false;
            return std::move(peeked_);
        }
        return scan();
    }

  private:
    Token scan() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\\') {  // comment to end of line
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                continue;
            }
            break;
        }
        Token tok;
        if (pos_ >= text_.size()) return tok;
        const char c = text_[pos_];
        if (c == '<' || c == '>' || c == '=' || c == '+' || c == '-' || c == ':') {
            tok.kind = Token::Kind::Op;
            tok.text = c;
            ++pos_;
            if ((c == '<' || c == '>') && pos_ < text_.size() && text_[pos_] == '=') ++pos_;
            if (c == '=' && pos_ < text_.size() && (text_[pos_] == '<' || text_[pos_] == '>')) {
                tok.text = text_[pos_];
                ++pos_;
            }
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            while (pos_ < text_.size()) {
                const char d = text_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' ||
                    d == 'E') {
                    ++pos_;
                    if ((d == 'e' || d == 'E') && pos_ < text_.size() &&
                        (text_[pos_] == '+' || text_[pos_] == '-')) {
                        ++pos_;
                    }
                } else {
                    break;
                }
            }
            tok.kind = Token::Kind::Number;
            tok.text = text_.substr(start, pos_ - start);
            tok.number = std::strtod(tok.text.c_str(), nullptr);
            return tok;
        }
        size_t start = pos_;
        while (pos_ < text_.size()) {
            const char d = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '<' || d == '>' || d == '=' ||
                d == '+' || d == '-' || d == ':' || d == '\\') {
                break;
            }
            ++pos_;
        }
        tok.kind = Token::Kind::Name;
        tok.text = text_.substr(start, pos_ - start);
        return tok;
    }

    const std::string& text_;
    size_t pos_ = 0;
    Token peeked_;
    bool has_peek_ = false;
};

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_infinity_name(const std::string& lower) {
    return lower == "inf" || lower == "infinity" || lower == "1e30" || lower == "+inf";
}

}  // namespace

MilpProblem parse_lp_text(const std::string& text) {
    MilpProblem problem;
    problem.name = "parsed";
    std::map<std::string, int> ids;
    std::vector<bool> explicit_bounds;

    auto var_id = [&](const std::string& name) {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        VarInfo info;
        info.name = name;
        info.lower = 0.0;
        info.upper = kInf;
        const int id = problem.add_variable(info);
        ids.emplace(name, id);
        explicit_bounds.push_back(false);
        return id;
    };

    enum class Section { Objective, Constraints, Bounds, Binary, General, Done };
    Lexer lex(text);
    double objective_sign = 1.0;

    // Objective header.
    {
        Token tok = lex.next();
        if (tok.kind != Token::Kind::Name) {
            throw Error(ErrorCode::ParseError, "LP text must start with an objective sense");
        }
        const std::string head = lowercase(tok.text);
        if (head == "minimize" || head == "min" || head == "minimise") {
            objective_sign = -1.0;
        } else if (head != "maximize" && head != "max" && head != "maximise") {
            throw Error(ErrorCode::ParseError, "unknown objective sense '" + tok.text + "'");
        }
    }

    auto section_of = [&](const std::string& lower, Section current) -> std::optional<Section> {
        if (lower == "subject" || lower == "st" || lower == "s.t." || lower == "such") {
            return Section::Constraints;
        }
        if (lower == "bounds" || lower == "bound") return Section::Bounds;
        if (lower == "binary" || lower == "binaries" || lower == "bin") return Section::Binary;
        if (lower == "general" || lower == "generals" || lower == "gen") return Section::General;
        if (lower == "end") return Section::Done;
        (void)current;
        return std::nullopt;
    };

    Section section = Section::Objective;
    std::vector<LinearTerm> terms;
    std::string pending_label;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    bool have_sign = false;

    auto flush_objective = [&] {
        problem.objective = terms;
        for (auto& t : problem.objective) t.coef *= objective_sign;
        terms.clear();
    };

    auto finish_constraint = [&](Sense sense, double rhs) {
        LinearConstraint c;
        c.name = pending_label.empty() ? "c" + std::to_string(problem.constraints.size())
                                       : pending_label;
        c.terms = terms;
        c.sense = sense;
        c.rhs = rhs;
        problem.add_constraint(std::move(c));
        pending_label.clear();
        terms.clear();
    };

    while (true) {
        Token tok = lex.next();
        if (tok.kind == Token::Kind::EndOfInput) break;

        if (tok.kind == Token::Kind::Name) {
            const std::string lower = lowercase(tok.text);
            auto sec = section_of(lower, section);
            if (sec) {
                if (lower == "subject" || lower == "such") lex.next();  // consume "to"/"that"
                if (section == Section::Objective) flush_objective();
                if (section == Section::Constraints && !terms.empty()) {
                    throw Error(ErrorCode::ParseError, "constraint without relation");
                }
                section = *sec;
                if (section == Section::Done) break;
                sign = 1.0;
                have_sign = false;
                have_coef = false;
                pending_label.clear();
                continue;
            }
        }

        switch (section) {
            case Section::Objective:
            case Section::Constraints: {
                if (tok.kind == Token::Kind::Op && tok.text == ":") {
                    // The previous bare name was a label.
                    if (!terms.empty() && !have_coef && !have_sign) {
                        pending_label = problem.variables[terms.back().var].name;
                        // Undo the variable created for the label if unused elsewhere.
                        const int id = terms.back().var;
                        terms.pop_back();
                        if (id == problem.variable_count() - 1) {
                            bool used = false;
                            for (const auto& t : terms) used |= t.var == id;
                            for (const auto& c : problem.constraints) {
                                for (const auto& t : c.terms) used |= t.var == id;
                            }
                            if (!used) {
                                ids.erase(problem.variables[id].name);
                                problem.variables.pop_back();
                                explicit_bounds.pop_back();
                            }
                        }
                    }
                    continue;
                }
                if (tok.kind == Token::Kind::Op && (tok.text == "+" || tok.text == "-")) {
                    sign *= tok.text == "-" ? -1.0 : 1.0;
                    have_sign = true;
                    continue;
                }
                if (tok.kind == Token::Kind::Number) {
                    coef = (have_coef ? coef : 1.0) * tok.number;
                    have_coef = true;
                    continue;
                }
                if (tok.kind == Token::Kind::Name) {
                    LinearTerm t;
                    t.var = var_id(tok.text);
                    t.coef = sign * (have_coef ? coef : 1.0);
                    terms.push_back(t);
                    sign = 1.0;
                    have_sign = false;
                    have_coef = false;
                    continue;
                }
                if (tok.kind == Token::Kind::Op &&
                    (tok.text == "<" || tok.text == ">" || tok.text == "=")) {
                    if (section == Section::Objective) {
                        throw Error(ErrorCode::ParseError, "relation inside objective");
                    }
                    Sense sense = tok.text == "<"   ? Sense::LessEq
                                  : tok.text == ">" ? Sense::GreaterEq
                                                    : Sense::Eq;
                    double rhs_sign = 1.0;
                    Token rhs = lex.next();
                    if (rhs.kind == Token::Kind::Op && (rhs.text == "-" || rhs.text == "+")) {
                        rhs_sign = rhs.text == "-" ? -1.0 : 1.0;
                        rhs = lex.next();
                    }
                    if (rhs.kind != Token::Kind::Number) {
                        throw Error(ErrorCode::ParseError, "constraint right-hand side missing");
                    }
                    finish_constraint(sense, rhs_sign * rhs.number);
                    sign = 1.0;
                    have_sign = false;
                    have_coef = false;
                    continue;
                }
                throw Error(ErrorCode::ParseError, "unexpected token '" + tok.text + "'");
            }
            case Section::Bounds: {
                // Forms: "l <= x <= u", "x <= u", "x >= l", "x = v", "x free".
                double lead_sign = 1.0;
                if (tok.kind == Token::Kind::Op && (tok.text == "-" || tok.text == "+")) {
                    lead_sign = tok.text == "-" ? -1.0 : 1.0;
                    tok = lex.next();
                }
                if (tok.kind == Token::Kind::Number ||
                    (tok.kind == Token::Kind::Name && is_infinity_name(lowercase(tok.text)))) {
                    const double lo = tok.kind == Token::Kind::Number ? lead_sign * tok.number
                                                                      : lead_sign * kInf;
                    Token rel = lex.next();
                    if (rel.kind != Token::Kind::Op || rel.text != "<") {
                        throw Error(ErrorCode::ParseError, "malformed bounds line");
                    }
                    Token name = lex.next();
                    if (name.kind != Token::Kind::Name) {
                        throw Error(ErrorCode::ParseError, "malformed bounds line");
                    }
                    const int id = var_id(name.text);
                    problem.variables[id].lower = lo;
                    explicit_bounds[id] = true;
                    if (lex.peek().kind == Token::Kind::Op && lex.peek().text == "<") {
                        lex.next();
                        double up_sign = 1.0;
                        Token up = lex.next();
                        if (up.kind == Token::Kind::Op && (up.text == "-" || up.text == "+")) {
                            up_sign = up.text == "-" ? -1.0 : 1.0;
                            up = lex.next();
                        }
                        if (up.kind == Token::Kind::Number) {
                            problem.variables[id].upper = up_sign * up.number;
                        } else if (up.kind == Token::Kind::Name &&
                                   is_infinity_name(lowercase(up.text))) {
                            problem.variables[id].upper = up_sign * kInf;
                        } else {
                            throw Error(ErrorCode::ParseError, "malformed bounds line");
                        }
                    }
                    continue;
                }
                if (tok.kind == Token::Kind::Name) {
                    const int id = var_id(tok.text);
                    const Token& nxt = lex.peek();
                    if (nxt.kind == Token::Kind::Name && lowercase(nxt.text) == "free") {
                        lex.next();
                        problem.variables[id].lower = -kInf;
                        problem.variables[id].upper = kInf;
                        explicit_bounds[id] = true;
                        continue;
                    }
                    Token rel = lex.next();
                    if (rel.kind != Token::Kind::Op) {
                        throw Error(ErrorCode::ParseError, "malformed bounds line");
                    }
                    double val_sign = 1.0;
                    Token val = lex.next();
                    if (val.kind == Token::Kind::Op && (val.text == "-" || val.text == "+")) {
                        val_sign = val.text == "-" ? -1.0 : 1.0;
                        val = lex.next();
                    }
                    double value;
                    if (val.kind == Token::Kind::Number) {
                        value = val_sign * val.number;
                    } else if (val.kind == Token::Kind::Name &&
                               is_infinity_name(lowercase(val.text))) {
                        value = val_sign * kInf;
                    } else {
                        throw Error(ErrorCode::ParseError, "malformed bounds line");
                    }
                    explicit_bounds[id] = true;
                    if (rel.text == "<") {
                        problem.variables[id].upper = value;
                    } else if (rel.text == ">") {
                        problem.variables[id].lower = value;
                    } else {
                        problem.variables[id].lower = value;
                        problem.variables[id].upper = value;
                    }
                    continue;
                }
                throw Error(ErrorCode::ParseError, "malformed bounds line");
            }
            case Section::Binary:
            case Section::General: {
                if (tok.kind != Token::Kind::Name) {
                    throw Error(ErrorCode::ParseError, "expected variable name in integer section");
                }
                const int id = var_id(tok.text);
                if (section == Section::Binary) {
                    problem.variables[id].kind = VarKind::Binary;
                    if (!explicit_bounds[id]) {
                        problem.variables[id].lower = 0.0;
                        problem.variables[id].upper = 1.0;
                    }
                }
                continue;
            }
            case Section::Done: break;
        }
    }

    if (section == Section::Objective) flush_objective();
    return problem;
}

std::string write_solution_text(const MilpProblem& problem, const MilpSolution& solution) {
    std::string out = "# solution status: ";
    out += solve_status_name(solution.status);
    out += '\n';
    out += "=obj= " + format_number(solution.objective_value) + "\n";
    for (size_t j = 0; j < problem.variables.size() && j < solution.values.size(); ++j) {
        out += problem.variables[j].name + " " + format_number(solution.values[j]) + "\n";
    }
    return out;
}

std::vector<double> parse_solution_text(const MilpProblem& problem, const std::string& text) {
    std::map<std::string, int> ids;
    for (int j = 0; j < problem.variable_count(); ++j) ids[problem.variables[j].name] = j;

    std::vector<double> values(problem.variable_count(), 0.0);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream fields(line);
        std::string name;
        std::string value_text;
        if (!(fields >> name >> value_text)) {
            throw Error(ErrorCode::SolutionParseError,
                        "line " + std::to_string(line_no) + ": expected 'name value'");
        }
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str() || *end != '\0') {
            throw Error(ErrorCode::SolutionParseError,
                        "line " + std::to_string(line_no) + ": bad numeric value '" + value_text +
                            "'");
        }
        if (name == "=obj=") continue;
        auto it = ids.find(name);
        if (it == ids.end()) {
            throw Error(ErrorCode::SolutionParseError,
                        "line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
        }
        values[it->second] = value;
    }
    return values;
}

namespace {

std::string unique_temp_path(const std::string& tag, const std::string& ext) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    std::ostringstream oss;
    oss << "resilix_" << tag << "_" << ::getpid() << "_" << stamp << "_"
        << counter.fetch_add(1) << ext;
    return (fs::temp_directory_path() / oss.str()).string();
}

std::string substitute(const std::string& tmpl, const std::string& key,
                       const std::string& value) {
    std::string out = tmpl;
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
        out.replace(pos, key.size(), value);
        pos += value.size();
    }
    return out;
}

}  // namespace

MilpSolution solve_external(const MilpProblem& problem, const std::string& command,
                            const SolveBudget& budget) {
    (void)budget;
    if (command.find("{input}") == std::string::npos ||
        command.find("{output}") == std::string::npos) {
        throw Error(ErrorCode::SolverLaunchFailed,
                    "solver command must contain {input} and {output} placeholders");
    }

    namespace fs = std::filesystem;
    const std::string input_path = unique_temp_path("in", ".lp");
    const std::string output_path = unique_temp_path("out", ".sol");
    struct Cleanup {
        const std::string &a, &b;
        ~Cleanup() {
            std::error_code ec;
            fs::remove(a, ec);
            fs::remove(b, ec);
        }
    } cleanup{input_path, output_path};

    {
        std::ofstream out(input_path);
        if (!out) {
            throw Error(ErrorCode::SolverLaunchFailed, "cannot write " + input_path);
        }
        out << write_lp_text(problem);
    }

    std::string cmd = substitute(command, "{input}", input_path);
    cmd = substitute(cmd, "{output}", output_path);
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        throw Error(ErrorCode::SolverLaunchFailed,
                    "command exited with code " + std::to_string(rc) + ": " + cmd);
    }

    std::ifstream in(output_path);
    if (!in) {
        throw Error(ErrorCode::SolutionParseError, "solver produced no solution file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::vector<double> values = parse_solution_text(problem, buffer.str());

    auto violations = check_solution(problem, values, 1e-6);
    if (!violations.empty()) {
        std::string msg = "external solution violates the problem: " + violations.front();
        if (violations.size() > 1) {
            msg += " (and " + std::to_string(violations.size() - 1) + " more)";
        }
        throw Error(ErrorCode::SolutionInvalid, msg);
    }

    MilpSolution solution;
    solution.status = SolveStatus::Optimal;
    solution.values = std::move(values);
    for (int j = 0; j < problem.variable_count(); ++j) {
        if (problem.variables[j].kind == VarKind::Binary) {
            solution.values[j] = std::round(solution.values[j]);
        }
    }
    solution.objective_value = problem.objective_value(solution.values);
    solution.bound_gap = 0.0;
    return solution;
}

}  // namespace resilix

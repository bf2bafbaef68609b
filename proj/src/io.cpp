#include "resilix/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace resilix {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

ordered_json parse_json(const std::string& text, const std::string& where) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        parse_fail(where, e.what());
    }
}

double number_field(const ordered_json& obj, const char* key, const std::string& where,
                    std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        parse_fail(where, std::string("missing field '") + key + "'");
    }
    if (!obj[key].is_number()) parse_fail(where, std::string("field '") + key + "' not a number");
    return obj[key].get<double>();
}

std::vector<double> number_array(const ordered_json& value, const std::string& where) {
    if (!value.is_array()) parse_fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& v : value) {
        if (!v.is_number()) parse_fail(where, "expected numeric entries");
        out.push_back(v.get<double>());
    }
    return out;
}

GeneratorSpec generator_from_json(const ordered_json& obj, const std::string& where) {
    GeneratorSpec g;
    if (!obj.is_object()) parse_fail(where, "generator must be an object");
    g.name = obj.value("name", std::string("gen"));
    g.p_min_kw = number_field(obj, "p_min_kw", where);
    g.p_max_kw = number_field(obj, "p_max_kw", where);
    g.ramp_kw_per_h = number_field(obj, "ramp_kw_per_h", where);
    g.op_cost_per_kwh = number_field(obj, "op_cost_per_kwh", where, 0.0);
    g.no_load_cost_per_h = number_field(obj, "no_load_cost_per_h", where, 0.0);
    g.startup_cost = number_field(obj, "startup_cost", where, 0.0);
    g.initially_on = obj.value("initially_on", false);
    return g;
}

ordered_json generator_to_json(const GeneratorSpec& g) {
    ordered_json obj;
    obj["name"] = g.name;
    obj["p_min_kw"] = g.p_min_kw;
    obj["p_max_kw"] = g.p_max_kw;
    obj["ramp_kw_per_h"] = g.ramp_kw_per_h;
    obj["op_cost_per_kwh"] = g.op_cost_per_kwh;
    obj["no_load_cost_per_h"] = g.no_load_cost_per_h;
    obj["startup_cost"] = g.startup_cost;
    obj["initially_on"] = g.initially_on;
    return obj;
}

}  // namespace

MicrogridSpec spec_from_json(const std::string& text) {
    const ordered_json doc = parse_json(text, "spec");
    if (!doc.is_object()) parse_fail("spec", "top level must be an object");

    MicrogridSpec spec;
    spec.interval_hours = number_field(doc, "interval_hours", "spec");
    if (doc.contains("generators")) {
        if (!doc["generators"].is_array()) parse_fail("spec.generators", "must be an array");
        int k = 0;
        for (const auto& g : doc["generators"]) {
            spec.generators.push_back(
                generator_from_json(g, "spec.generators[" + std::to_string(k++) + "]"));
        }
    }
    if (doc.contains("inverters")) {
        if (!doc["inverters"].is_array()) parse_fail("spec.inverters", "must be an array");
        int k = 0;
        for (const auto& inv : doc["inverters"]) {
            const std::string where = "spec.inverters[" + std::to_string(k++) + "]";
            if (!inv.is_object()) parse_fail(where, "inverter must be an object");
            InverterSpec is;
            is.name = inv.value("name", std::string("inv"));
            if (inv.contains("output_kw")) is.output_kw = number_array(inv["output_kw"], where);
            spec.inverters.push_back(std::move(is));
        }
    }
    if (doc.contains("load")) {
        if (!doc["load"].is_object() || !doc["load"].contains("critical_kw")) {
            parse_fail("spec.load", "expected an object with critical_kw");
        }
        spec.load.critical_kw = number_array(doc["load"]["critical_kw"], "spec.load.critical_kw");
    }
    if (doc.contains("portable_dg") && !doc["portable_dg"].is_null()) {
        spec.portable_dg_template = generator_from_json(doc["portable_dg"], "spec.portable_dg");
    }
    if (doc.contains("profiles_csv") && doc["profiles_csv"].is_string()) {
        apply_profiles_csv(spec, doc["profiles_csv"].get<std::string>());
    }
    return spec;
}

std::string spec_to_json(const MicrogridSpec& spec) {
    ordered_json doc;
    doc["interval_hours"] = spec.interval_hours;
    doc["generators"] = ordered_json::array();
    for (const auto& g : spec.generators) doc["generators"].push_back(generator_to_json(g));
    doc["inverters"] = ordered_json::array();
    for (const auto& inv : spec.inverters) {
        ordered_json obj;
        obj["name"] = inv.name;
        obj["output_kw"] = inv.output_kw;
        doc["inverters"].push_back(std::move(obj));
    }
    doc["load"]["critical_kw"] = spec.load.critical_kw;
    if (spec.portable_dg_template) {
        doc["portable_dg"] = generator_to_json(*spec.portable_dg_template);
    }
    return doc.dump(2) + "\n";
}

EventProfile event_from_json(const std::string& text) {
    const ordered_json doc = parse_json(text, "event");
    if (!doc.is_object() || !doc.contains("stages") || !doc["stages"].is_array()) {
        parse_fail("event", "expected an object with a stages array");
    }
    EventProfile event;
    int k = 0;
    for (const auto& stage : doc["stages"]) {
        const std::string where = "event.stages[" + std::to_string(k++) + "]";
        if (!stage.is_object()) parse_fail(where, "stage must be an object");
        EventStage es;
        es.intervals = static_cast<int>(number_field(stage, "intervals", where));
        if (!stage.contains("failure_prob")) parse_fail(where, "missing field 'failure_prob'");
        const auto& prob = stage["failure_prob"];
        if (prob.is_number()) {
            es.probs = {prob.get<double>()};
        } else {
            es.probs = number_array(prob, where + ".failure_prob");
        }
        event.stages.push_back(std::move(es));
    }
    return event;
}

std::string event_to_json(const EventProfile& event) {
    ordered_json doc;
    doc["stages"] = ordered_json::array();
    for (const auto& stage : event.stages) {
        ordered_json obj;
        obj["intervals"] = stage.intervals;
        if (stage.probs.size() == 1) {
            obj["failure_prob"] = stage.probs[0];
        } else {
            obj["failure_prob"] = stage.probs;
        }
        doc["stages"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

void apply_profiles_csv(MicrogridSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_fail(path, "cannot open CSV file");

    std::string line;
    if (!std::getline(in, line)) parse_fail(path, "empty CSV file");
    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(s);
        while (std::getline(ss, field, ',')) {
            while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
                field.pop_back();
            }
            size_t start = field.find_first_not_of(' ');
            fields.push_back(start == std::string::npos ? "" : field.substr(start));
        }
        return fields;
    };

    const std::vector<std::string> header = split(line);
    if (header.size() < 2 || header[0] != "time" || header[1] != "critical_kw") {
        parse_fail(path, "header must start with 'time,critical_kw'");
    }
    std::vector<int> column_to_inverter(header.size(), -1);
    for (size_t c = 2; c < header.size(); ++c) {
        bool found = false;
        for (int i = 0; i < spec.inverter_count(); ++i) {
            if (spec.inverters[i].name == header[c]) {
                column_to_inverter[c] = i;
                found = true;
                break;
            }
        }
        if (!found) parse_fail(path, "column '" + header[c] + "' names no inverter in the spec");
    }

    spec.load.critical_kw.clear();
    for (auto& inv : spec.inverters) inv.output_kw.clear();

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != header.size()) {
            parse_fail(path, "line " + std::to_string(line_no) + " has " +
                                 std::to_string(fields.size()) + " fields, header has " +
                                 std::to_string(header.size()));
        }
        auto to_number = [&](const std::string& s, size_t col) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0') {
                parse_fail(path, "line " + std::to_string(line_no) + ", column '" + header[col] +
                                     "': bad number '" + s + "'");
            }
            return v;
        };
        spec.load.critical_kw.push_back(to_number(fields[1], 1));
        for (size_t c = 2; c < fields.size(); ++c) {
            spec.inverters[column_to_inverter[c]].output_kw.push_back(to_number(fields[c], c));
        }
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_fail(path, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) parse_fail(path, "cannot write file");
    out << content;
}

MicrogridSpec load_spec_file(const std::string& path) {
    return spec_from_json(read_text_file(path));
}

EventProfile load_event_file(const std::string& path) {
    return event_from_json(read_text_file(path));
}

std::pair<MicrogridSpec, EventProfile> load_inputs(const std::string& spec_path,
                                                   const std::string& event_path,
                                                   const std::string& profiles_csv_path) {
    MicrogridSpec spec = load_spec_file(spec_path);
    if (!profiles_csv_path.empty()) apply_profiles_csv(spec, profiles_csv_path);
    EventProfile event = load_event_file(event_path);
    require_valid(spec, event);
    return {std::move(spec), std::move(event)};
}

std::string scenario_set_to_json(const ScenarioSet& set) {
    ordered_json doc;
    doc["seed"] = set.seed;
    doc["sample_count"] = set.sample_count;
    doc["probability_mode"] = probability_mode_name(set.probability_mode);
    doc["scenarios"] = ordered_json::array();
    for (int s = 0; s < set.size(); ++s) {
        const auto& m = set.scenarios[s];
        ordered_json rows = ordered_json::array();
        for (int t = 0; t < m.periods; ++t) {
            ordered_json row = ordered_json::array();
            for (int i = 0; i < m.inverters; ++i) row.push_back(static_cast<int>(m.at(t, i)));
            rows.push_back(std::move(row));
        }
        ordered_json obj;
        obj["flags"] = std::move(rows);
        obj["weight"] = set.weights[s];
        obj["occurrences"] = set.occurrences[s];
        doc["scenarios"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

ScenarioSet scenario_set_from_json(const std::string& text) {
    const ordered_json doc = parse_json(text, "scenario set");
    ScenarioSet set;
    set.seed = doc.value("seed", 0ull);
    set.sample_count = doc.value("sample_count", 0l);
    const std::string mode = doc.value("probability_mode", std::string("empirical"));
    auto parsed_mode = probability_mode_from_name(mode);
    if (!parsed_mode) parse_fail("scenario set", "unknown probability_mode '" + mode + "'");
    set.probability_mode = *parsed_mode;
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) {
        parse_fail("scenario set", "missing scenarios array");
    }
    for (const auto& obj : doc["scenarios"]) {
        FailureMatrix m;
        const auto& rows = obj["flags"];
        if (!rows.is_array() || rows.empty()) parse_fail("scenario set", "flags must be rows");
        m.periods = static_cast<int>(rows.size());
        m.inverters = static_cast<int>(rows[0].size());
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != m.inverters) {
                parse_fail("scenario set", "ragged flags matrix");
            }
            for (const auto& cell : row) {
                const int v = cell.get<int>();
                if (v != 0 && v != 1) parse_fail("scenario set", "flags must be 0 or 1");
                m.flags.push_back(static_cast<uint8_t>(v));
            }
        }
        set.scenarios.push_back(std::move(m));
        set.weights.push_back(obj.value("weight", 0.0));
        set.occurrences.push_back(obj.value("occurrences", 0l));
    }
    return set;
}

namespace {

ordered_json histogram_to_json(const FailureHistogram& histogram) {
    ordered_json out;
    out["by_total_flags"] = ordered_json::array();
    for (const auto& [bin, data] : histogram.by_total_flags) {
        ordered_json row;
        row["failures"] = bin;
        row["count"] = data.raw;
        row["frequency"] = data.weighted;
        out["by_total_flags"].push_back(std::move(row));
    }
    out["by_distinct_inverters"] = ordered_json::array();
    for (const auto& [bin, data] : histogram.by_distinct_inverters) {
        ordered_json row;
        row["failures"] = bin;
        row["count"] = data.raw;
        row["frequency"] = data.weighted;
        out["by_distinct_inverters"].push_back(std::move(row));
    }
    return out;
}

ordered_json plan_to_json(const RopPlan& plan) {
    ordered_json out;
    out["sr"] = plan.sr;
    out["commitment"] = plan.commitment;
    out["scenario_success"] = plan.scenario_success;
    out["interval_success"] = plan.interval_success;
    out["net_power"] = plan.net_power;
    out["dispatch"] = plan.dispatch;
    out["usage"] = plan.usage;
    out["availability"] = plan.availability;
    return out;
}

}  // namespace

std::string report_to_json(const SurvivabilityReport& report) {
    ordered_json doc;
    doc["config"]["alpha"] = report.config.alpha;
    doc["config"]["target_sr"] = report.config.target_sr;
    doc["config"]["scenario_count"] = report.config.scenario_count;
    doc["config"]["seed"] = report.config.seed ? ordered_json(*report.config.seed)
                                               : ordered_json(nullptr);
    doc["config"]["max_added_dgs"] = report.config.max_added_dgs;
    doc["config"]["solver"] =
        report.config.solver == SolverBackend::Bundled ? "bundled" : "external";
    doc["config"]["cost_tiebreak"] = report.config.cost_tiebreak;
    doc["rop_sr"] = report.rop_sr;
    doc["mem_sr"] = report.mem_sr;
    doc["mem_feasible"] = report.mem_feasible;
    doc["added_dg_count"] = report.added_dg_count;
    doc["enhancement_exhausted"] = report.enhancement_exhausted;
    doc["enhancement_trace"] = ordered_json::array();
    for (const auto& step : report.enhancement_trace) {
        ordered_json row;
        row["added_dgs"] = step.added_dg_count;
        row["sr"] = step.sr;
        doc["enhancement_trace"].push_back(std::move(row));
    }
    doc["histogram"] = histogram_to_json(report.histogram);
    doc["plan"] = plan_to_json(report.plan);
    return doc.dump(2) + "\n";
}

std::string alpha_table_to_json(const std::vector<std::pair<double, double>>& table) {
    ordered_json doc = ordered_json::array();
    for (const auto& [alpha, sr] : table) {
        ordered_json row;
        row["alpha"] = alpha;
        row["sr"] = sr;
        doc.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

namespace {

std::string percent(double x) {
    std::ostringstream oss;
    oss << std::fixed << std::setprecision(1) << 100.0 * x << "%";
    return oss.str();
}

}  // namespace

std::string report_to_text(const SurvivabilityReport& report) {
    std::ostringstream oss;
    oss << "survivability rate\n";
    oss << "  ROP  " << percent(report.rop_sr) << "\n";
    if (report.mem_feasible) {
        oss << "  MEM  " << percent(report.mem_sr) << "\n";
    } else {
        oss << "  MEM  infeasible\n";
    }
    if (report.enhancement_trace.size() > 1 || report.config.max_added_dgs > 0) {
        oss << "enhancement trace (target " << percent(report.config.target_sr) << ")\n";
        oss << "  added DGs |";
        for (const auto& step : report.enhancement_trace) {
            oss << " " << std::setw(6) << step.added_dg_count << " |";
        }
        oss << "\n  SR        |";
        for (const auto& step : report.enhancement_trace) {
            oss << " " << std::setw(6) << percent(step.sr) << " |";
        }
        oss << "\n";
        if (report.enhancement_exhausted) {
            oss << "  target not met before max added DGs (ENHANCEMENT_EXHAUSTED)\n";
        }
    }
    return oss.str();
}

std::string alpha_table_to_text(const std::vector<std::pair<double, double>>& table) {
    std::ostringstream oss;
    oss << "alpha |";
    for (const auto& [alpha, sr] : table) {
        (void)sr;
        oss << " " << std::setw(6) << percent(alpha) << " |";
    }
    oss << "\nSR    |";
    for (const auto& [alpha, sr] : table) {
        (void)alpha;
        oss << " " << std::setw(6) << percent(sr) << " |";
    }
    oss << "\n";
    return oss.str();
}

std::string histogram_to_plot_text(const FailureHistogram& histogram) {
    std::ostringstream oss;
    for (const auto& [bin, data] : histogram.by_total_flags) {
        oss << bin << " " << data.raw << "\n";
    }
    return oss.str();
}

}  // namespace resilix

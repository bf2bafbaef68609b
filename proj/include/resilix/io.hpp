#pragma once

#include <string>
#include <utility>
#include <vector>

#include "resilix/model.hpp"
#include "resilix/rop.hpp"
#include "resilix/scenario.hpp"

namespace resilix {

// JSON spec/event files; the optional CSV carries the time series with a
// header "time,critical_kw,<inverter names...>". Parsed inputs are
// validated before being returned.
std::pair<MicrogridSpec, EventProfile> load_inputs(const std::string& spec_path,
                                                   const std::string& event_path,
                                                   const std::string& profiles_csv_path = {});

MicrogridSpec load_spec_file(const std::string& path);
EventProfile load_event_file(const std::string& path);
void apply_profiles_csv(MicrogridSpec& spec, const std::string& path);

std::string spec_to_json(const MicrogridSpec& spec);
MicrogridSpec spec_from_json(const std::string& text);
std::string event_to_json(const EventProfile& event);
EventProfile event_from_json(const std::string& text);

std::string scenario_set_to_json(const ScenarioSet& set);
ScenarioSet scenario_set_from_json(const std::string& text);

std::string report_to_json(const SurvivabilityReport& report);
std::string alpha_table_to_json(const std::vector<std::pair<double, double>>& table);

// Aligned-column text renderings for terminals.
std::string report_to_text(const SurvivabilityReport& report);
std::string alpha_table_to_text(const std::vector<std::pair<double, double>>& table);
std::string histogram_to_plot_text(const FailureHistogram& histogram);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace resilix

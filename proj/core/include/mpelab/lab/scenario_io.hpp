#pragma once

#include <string>
#include <vector>

#include "mpelab/population/scenario.hpp"

namespace mpelab::lab {

// Scenario files are JSON; docs/scenario_schema.md lists every key. Unknown keys are rejected.
// Errors are ConfigError with "source:line:col" for syntax and the dotted field path otherwise.
// A file holds one scenario object or an array of them.
std::vector<population::ScenarioSpec> parse_scenarios(const std::string& text, const std::string& source = "<string>");
std::vector<population::ScenarioSpec> load_scenario_file(const std::string& path);

// Serialises a scenario in the same schema; parse_scenarios(scenario_to_json(s)) reproduces s.
std::string scenario_to_json(const population::ScenarioSpec& spec);

} // namespace mpelab::lab

#pragma once

#include <string>
#include <vector>

#include "mpelab/population/scenario.hpp"

namespace mpelab::lab {

// Built-in scenarios, in listing order.
const std::vector<population::ScenarioSpec>& catalog();
std::vector<std::string> catalog_ids();
// Throws ConfigError for an unknown id.
population::ScenarioSpec catalog_scenario(const std::string& id);

// Scenarios used by the targeting and IV extensions; part of the catalog, tagged by section.
std::vector<std::string> catalog_ids_in(const std::string& section);

} // namespace mpelab::lab

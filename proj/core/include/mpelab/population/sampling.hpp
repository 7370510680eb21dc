#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mpelab/population/scenario.hpp"

namespace mpelab::population {

// One row per agent. Allocation and outcome columns are filled by mechanism::assign.
struct AgentTable {
    std::vector<PolicyPoint> policy;
    std::vector<Report> report;
    std::vector<int> a;
    std::vector<double> y;
    bool has_x = false;
    bool has_z = false;
    bool has_xi = false;

    std::size_t size() const { return policy.size(); }
    bool assigned() const { return a.size() == policy.size(); }
};

AgentTable sample_population(const ScenarioSpec& spec, std::size_t n, std::uint64_t seed, bool antithetic = false);

} // namespace mpelab::population

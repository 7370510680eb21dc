#pragma once

#include <cstdint>

#include "mpelab/mechanism/mechanism.hpp"
#include "mpelab/population/sampling.hpp"

namespace mpelab::mechanism {

// Draws each agent's allocation from mu(R_i, c, d) and its outcome Y = m~(W_i, A_i, R_i) + e_i.
// Streams are keyed on the agent index, so the result does not depend on the worker count.
void assign(const Mechanism& mech, population::AgentTable& agents, const Vec& c, const ReportDistribution& d,
            const population::OutcomeLaw& outcome, std::uint64_t seed);

// Draws an allocation from mu given a uniform; the outside option takes the residual.
int draw_allocation(const Alloc& mu, int allocations, double u);

} // namespace mpelab::mechanism

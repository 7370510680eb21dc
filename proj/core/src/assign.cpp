#include "mpelab/mechanism/assign.hpp"

#include "mpelab/errors.hpp"
#include "mpelab/numerics/parallel.hpp"
#include "mpelab/numerics/rng.hpp"

namespace mpelab::mechanism {

using numerics::CounterRng;
using numerics::Purpose;
using numerics::stream_id;

int draw_allocation(const Alloc& mu, int allocations, double u)
{
    double acc = 0.0;
    for (int a = 1; a < allocations; ++a) {
        acc += mu[static_cast<std::size_t>(a)];
        if (u < acc) return a;
    }
    return 0;
}

void assign(const Mechanism& mech, population::AgentTable& agents, const Vec& c, const ReportDistribution& d,
            const population::OutcomeLaw& outcome, std::uint64_t seed)
{
    if (outcome.allocations() != mech.allocations())
        throw ConfigError("assign: outcome law has " + std::to_string(outcome.allocations()) +
                          " allocations, mechanism '" + mech.id() + "' has " + std::to_string(mech.allocations()));
    const std::size_t n = agents.size();
    agents.a.assign(n, 0);
    agents.y.assign(n, 0.0);
    const int na = mech.allocations();
    numerics::parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Report& r = agents.report[i];
            CounterRng arng(seed, stream_id(i, Purpose::allocation));
            const int a = draw_allocation(mech.allocation(r, c, d), na, arng.uniform());
            CounterRng nrng(seed, stream_id(i, Purpose::noise));
            const double u = nrng.uniform();
            const double eps = outcome.noise().family() == population::NoiseLaw::Family::none ? 0.0 : outcome.noise().quantile(u);
            agents.a[i] = a;
            agents.y[i] = outcome.mean(agents.policy[i], a, r) + eps;
        }
    });
}

} // namespace mpelab::mechanism

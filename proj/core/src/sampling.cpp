#include "mpelab/population/sampling.hpp"

#include <map>
#include <utility>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/parallel.hpp"
#include "mpelab/numerics/rng.hpp"

namespace mpelab::population {

using numerics::CounterRng;
using numerics::Purpose;
using numerics::stream_id;

AgentTable sample_population(const ScenarioSpec& spec, std::size_t n, std::uint64_t seed, bool antithetic)
{
    if (n == 0) throw ConfigError("sample_population: n must be at least 1");
    validate_scenario(spec);
    AgentTable t;
    t.policy.resize(n);
    t.report.resize(n);
    const auto fam = spec.policy_law.family();
    t.has_x = fam == PolicyLaw::Family::covariate;
    t.has_z = t.has_xi = fam == PolicyLaw::Family::instrument;

    // The report law depends on (w, x) only; with both discrete, evaluate it once per value.
    const bool cache = fam != PolicyLaw::Family::truncated_normal &&
                       (fam != PolicyLaw::Family::covariate || spec.policy_law.x_discrete());
    numerics::parallel_for(n, [&](std::size_t b, std::size_t e) {
        std::map<std::pair<double, double>, ConditionalReportLaw> laws;
        for (std::size_t i = b; i < e; ++i) {
            // Antithetic pairs share a stream index and reflect the odd member's uniforms.
            const std::uint64_t agent = antithetic ? i / 2 : i;
            const bool flip = antithetic && (i % 2 == 1);
            CounterRng prng(seed, stream_id(agent, Purpose::policy), flip);
            t.policy[i] = spec.policy_law.sample(prng);
            CounterRng rrng(seed, stream_id(agent, Purpose::report), flip);
            const double ut = rrng.uniform();
            const double u1 = rrng.uniform();
            const double u2 = rrng.uniform();
            if (!cache) {
                t.report[i] = spec.report_law.sample(t.policy[i], ut, u1, u2);
                continue;
            }
            const std::pair<double, double> key{t.policy[i].w, t.policy[i].x};
            auto it = laws.find(key);
            if (it == laws.end()) it = laws.emplace(key, spec.report_law.at(t.policy[i])).first;
            t.report[i] = spec.report_law.sample(it->second, ut, u1, u2);
        }
    });
    return t;
}

} // namespace mpelab::population

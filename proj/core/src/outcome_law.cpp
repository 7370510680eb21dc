#include "mpelab/population/outcome_law.hpp"

#include <cmath>

#include "mpelab/errors.hpp"

namespace mpelab::population {

OutcomeLaw::OutcomeLaw(std::vector<Polynomial> mean_by_allocation, NoiseLaw noise)
    : means_(std::move(mean_by_allocation)), noise_(noise)
{
    if (means_.empty()) throw ConfigError("outcome law needs a mean function for every allocation");
    for (const auto& m : means_)
        for (const auto& t : m.terms())
            if (!std::isfinite(t.coef)) throw ConfigError("outcome law has a non-finite coefficient");
}

OutcomeLaw OutcomeLaw::shifted(int a, double delta) const
{
    OutcomeLaw out = *this;
    out.means_[static_cast<std::size_t>(a)] += Polynomial::constant(delta);
    return out;
}

} // namespace mpelab::population

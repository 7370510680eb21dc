#include "mpelab/population/scenario.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "mpelab/errors.hpp"

namespace mpelab::population {

Population::Population(const ScenarioSpec& spec, const numerics::QuadratureConfig& quad)
    : spec_(spec), quad_(quad), atoms_(spec.policy_law.atoms(quad.policy_nodes))
{
    std::map<std::pair<double, double>, std::size_t> index;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& p = atoms_[i].point;
        const auto key = std::make_pair(p.w, p.x);
        auto it = index.find(key);
        if (it == index.end()) {
            Component c;
            c.point.w = p.w;
            c.point.x = p.x;
            c.law = spec_.report_law.at(c.point);
            it = index.emplace(key, components_.size()).first;
            components_.push_back(std::move(c));
        }
        components_[it->second].atoms.push_back(i);
    }
}

std::vector<double> Population::baseline_weights() const
{
    std::vector<double> w(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) w[i] = atoms_[i].weight;
    return w;
}

std::vector<double> Population::perturbed_weights(const PolicyScore& s, double theta) const
{
    const auto atoms = perturbed_policy_atoms(atoms_, s, theta);
    std::vector<double> w(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) w[i] = atoms[i].weight;
    return w;
}

std::vector<double> Population::score_values(const PolicyScore& s) const
{
    std::vector<double> v(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) v[i] = s(atoms_[i].point);
    return v;
}

void validate_scenario(const ScenarioSpec& spec)
{
    const auto& law = spec.report_law;
    const auto& space = law.space();
    for (int j = 0; j < space.n_cont; ++j)
        if (!(space.hi[static_cast<std::size_t>(j)] > space.lo[static_cast<std::size_t>(j)]))
            throw ConfigError("scenario '" + spec.id + "': report bounds must satisfy lo < hi");

    const auto atoms = spec.policy_law.atoms(256);
    double mass = 0.0;
    for (const auto& a : atoms) mass += a.weight;
    if (std::abs(mass - 1.0) > 1e-8) throw ConfigError("scenario '" + spec.id + "': policy law does not integrate to one");

    // Each conditional coordinate density must integrate to one over its bounds.
    std::size_t step = std::max<std::size_t>(1, atoms.size() / 16);
    for (std::size_t i = 0; i < atoms.size(); i += step) {
        const auto cond = law.at(atoms[i].point);
        double tp = 0.0;
        for (double p : cond.type_probs) tp += p;
        if (std::abs(tp - 1.0) > 1e-10) throw ConfigError("scenario '" + spec.id + "': type probabilities do not sum to one");
        for (std::size_t j = 0; j < cond.coords.size(); ++j) {
            const auto& d = cond.coords[j];
            numerics::CompositeRule rule(d->lo(), d->hi(), 400, d->kinks());
            const double m = rule.integrate([&](double x) { return d->pdf(x); });
            if (std::abs(m - 1.0) > 1e-8)
                throw ConfigError("scenario '" + spec.id + "': report density for coordinate " + std::to_string(j) +
                                  " integrates to " + std::to_string(m));
        }
    }

    if (spec.outcome_law.allocations() < 2) throw ConfigError("scenario '" + spec.id + "': outcome law needs at least two allocations");
    for (int a = 0; a < spec.outcome_law.allocations(); ++a) {
        for (std::size_t i = 0; i < atoms.size(); i += step) {
            for (int t = 0; t < space.n_types; ++t) {
                for (int g = 0; g <= 32; ++g) {
                    Report r;
                    r.type = t;
                    for (int j = 0; j < space.n_cont; ++j)
                        r.x[static_cast<std::size_t>(j)] =
                            space.lo[static_cast<std::size_t>(j)] +
                            (space.hi[static_cast<std::size_t>(j)] - space.lo[static_cast<std::size_t>(j)]) * g / 32.0;
                    if (!std::isfinite(spec.outcome_law.mean(atoms[i].point, a, r)))
                        throw ConfigError("scenario '" + spec.id + "': outcome mean is not finite on the report grid");
                }
            }
        }
    }
    if (spec.outcome_law.noise().family() == NoiseLaw::Family::normal && !(spec.outcome_law.noise().scale() > 0.0))
        throw ConfigError("scenario '" + spec.id + "': normal noise needs a positive sd");
}

} // namespace mpelab::population

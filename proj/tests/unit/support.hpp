#pragma once

#include <memory>
#include <string>

#include "mpelab/errors.hpp"
#include "mpelab/lab/catalog.hpp"
#include "mpelab/lab/scenario_io.hpp"
#include "mpelab/population/scenario.hpp"
#include "mpelab/welfare/mpe.hpp"

namespace mpelab::test {

// A model together with the population it points into.
struct Fixture {
    std::unique_ptr<population::Population> pop;
    std::shared_ptr<welfare::AnalyticModel> model;
    const welfare::AnalyticModel& m() const { return *model; }
};

inline population::ScenarioSpec from_json(const std::string& text)
{
    return lab::parse_scenarios(text, "test").at(0);
}

inline Fixture build(const population::ScenarioSpec& spec, const welfare::FunctionalSpec& f = {},
                     numerics::QuadratureConfig quad = {})
{
    Fixture fx;
    fx.pop = std::make_unique<population::Population>(spec, quad);
    fx.model = welfare::build_model(*fx.pop, f);
    return fx;
}

inline Fixture build(const std::string& catalog_id, const welfare::FunctionalSpec& f = {})
{
    return build(lab::catalog_scenario(catalog_id), f);
}

inline population::PolicyScore score(const population::ScenarioSpec& spec, const std::string& id)
{
    for (const auto& s : spec.scores)
        if (s.id == id) return population::make_policy_score(s, spec.policy_law, 256);
    throw ConfigError("no score " + id);
}

inline double rel_err(double a, double b)
{
    const double d = std::abs(a - b);
    return std::abs(b) > 1e-12 ? d / std::abs(b) : d;
}

} // namespace mpelab::test

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpelab/numerics/quadrature.hpp"
#include "mpelab/population/outcome_law.hpp"
#include "mpelab/population/policy_law.hpp"
#include "mpelab/population/report_law.hpp"
#include "mpelab/population/score.hpp"

namespace mpelab::population {

struct MechanismConfig {
    std::string id;
    int participants = 2;  // second-price auction: bidders per auction
};

struct ConductConfig {
    std::string id;            // capacity | myerson | ttc_path
    std::vector<double> q;     // capacity targets
    std::string path = "linear";  // ttc_path: linear | trade_balance
};

struct SolverConfig {
    int max_iter = 200;
    double tol = 1e-10;
    int grid_nodes = 4096;     // Sturm-Liouville grid
};

struct Seeds {
    std::uint64_t sample = 1;
    std::uint64_t assign = 2;
    std::uint64_t oracle = 3;
};

struct ReportScoreSpec {
    std::string id;
    std::string kind = "polynomial";  // polynomial | cosine
    Polynomial expr;                  // polynomial: in (r1, r2, t)
    int coord = 0;                    // cosine
    double freq = 1.0;
    double phase = 0.0;
};

struct ScenarioSpec {
    std::string id;
    std::string description;
    std::string section;  // catalog listing tag, e.g. "rationing"
    PolicyLaw policy_law = PolicyLaw::bernoulli(0.5);
    ReportLaw report_law;
    OutcomeLaw outcome_law;
    MechanismConfig mechanism;
    ConductConfig conduct;
    SolverConfig solver;
    Seeds seeds;
    std::vector<ScoreSpec> scores;
    std::vector<ReportScoreSpec> report_scores;
    std::vector<std::string> functionals{"mean"};
    std::size_t mc_samples = 100000;
};

// Policy atoms that share (w, x) share a conditional report law; they are pooled into one
// component so report-space integrals run once per component rather than once per atom.
struct Component {
    PolicyPoint point;
    ConditionalReportLaw law;
    std::vector<std::size_t> atoms;
};

// A scenario materialised on a quadrature: policy atoms, report components and laws.
class Population {
public:
    Population(const ScenarioSpec& spec, const numerics::QuadratureConfig& quad);

    const ScenarioSpec& spec() const { return spec_; }
    const numerics::QuadratureConfig& quadrature() const { return quad_; }
    const std::vector<PolicyAtom>& atoms() const { return atoms_; }
    const std::vector<Component>& components() const { return components_; }
    const ReportSpace& space() const { return spec_.report_law.space(); }
    const OutcomeLaw& outcome() const { return spec_.outcome_law; }

    std::vector<double> baseline_weights() const;
    // Atom weights of the linear path f_W (1 + theta s_W); throws PathError outside the admissible range.
    std::vector<double> perturbed_weights(const PolicyScore& s, double theta) const;
    std::vector<double> score_values(const PolicyScore& s) const;

private:
    ScenarioSpec spec_;
    numerics::QuadratureConfig quad_;
    std::vector<PolicyAtom> atoms_;
    std::vector<Component> components_;
};

// Checks the scenario invariants (normalisation, finite continuous outcome means); throws ConfigError.
void validate_scenario(const ScenarioSpec& spec);

} // namespace mpelab::population

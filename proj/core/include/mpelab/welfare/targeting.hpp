#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpelab/welfare/mpe.hpp"

namespace mpelab::welfare {

// A direction h(x) tabulated on the covariate atoms, linearly interpolated in between.
struct Direction {
    std::string id;
    std::vector<double> x;
    std::vector<double> h;
    double operator()(double xv) const;
};

struct CateProfile {
    std::string mode;          // oracle | estimated
    std::vector<double> x;     // covariate atoms, or bin centres
    std::vector<double> cate;
    std::vector<double> se;    // estimated only
    std::vector<double> mass;  // P(X = x), or bin shares
    std::vector<std::string> warnings;
    double norm() const;       // sqrt(E[CATE^2])
};

// x -> E[Psi | W=1, X=x] - E[Psi | W=0, X=x] on the covariate atoms.
CateProfile cate_psi_oracle(const AnalyticModel& m);

// Per-bin inverse-propensity contrast of Psi_total over equal-mass bins of x (one bin per support
// point for a discrete X). Bins without 10 treated and 10 control agents are merged into a neighbour.
CateProfile cate_psi_estimated(const std::vector<double>& psi_total, const population::AgentTable& agents,
                               const population::PolicyLaw& law, int bins = 20);

// Score (W / p(X) - (1 - W) / (1 - p(X))) h(X).
population::PolicyScore targeting_score(const Direction& h, const population::PolicyLaw& law);

struct TargetingResult {
    CateProfile cate;
    double cap = 1.0;           // norm cap C on E[h^2]
    Direction optimal;          // sqrt(C) CATE / ||CATE||
    Direction ewm;              // sqrt(C) sign(CATE)
    double mpe_optimal = 0.0;   // full pipeline
    double mpe_closed_form = 0.0;  // sqrt(C) ||CATE||
    double mpe_ewm = 0.0;
    std::vector<double> mpe_random;
    double max_random_excess = 0.0;  // max(mpe_random) - mpe_optimal
};

// Random directions with E[h^2] = cap: Legendre series of degree <= 4 for continuous X,
// independent normal values per support point for discrete X.
std::vector<Direction> random_directions(const population::PolicyLaw& law, const std::vector<double>& x_atoms,
                                         const std::vector<double>& mass, double cap, int count, std::uint64_t seed);

TargetingResult optimal_targeting(const AnalyticModel& m, double cap = 1.0, int random_count = 100,
                                  std::uint64_t seed = 1);

} // namespace mpelab::welfare

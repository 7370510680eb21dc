#pragma once

#include <string>
#include <vector>

#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/mechanism/mechanism.hpp"
#include "mpelab/numerics/roots.hpp"
#include "mpelab/population/scenario.hpp"

namespace mpelab::clearing {

using mechanism::Mat;
using mechanism::Mechanism;
using mechanism::ReportDistribution;
using mechanism::Vec;

struct EquilibriumState {
    std::string rule;          // capacity | myerson | ttc_path
    Vec c;
    Vec q;                     // capacity targets (empty for myerson)
    double residual = 0.0;     // max |share - q|, or |FOC| for myerson
    // capacity: d(aggregate share)/dc. myerson: dG/dc = -(2 f(c) + c f'(c)) for G = 1 - F(c) - c f(c).
    Mat jacobian;
    double condition = 1.0;
    int iterations = 0;
    std::vector<std::string> warnings;
    // ttc_path only
    double stop_time = 0.0;
    bool capacity_flag = false;  // school 2 never fills; its second-round cutoff was set to 0
};

// Capacity clearing E_P[mu_share(l)(R, c)] = q_l. One dimension: safeguarded Newton on a
// sign-changing bracket; several: damped Newton with the analytic share Jacobian.
EquilibriumState solve_capacity_clearing(const Mechanism& mech, const ReportDistribution& d, const Vec& q,
                                         const numerics::SolverOptions& opts = {});

// Reserve solving c f(c) = 1 - F(c) for the pooled bid marginal. With several roots the
// leftmost is returned and a warning recorded.
EquilibriumState solve_myerson_reserve(const ReportDistribution& d, const numerics::SolverOptions& opts = {});

// Dispatches on the scenario's conduct rule.
EquilibriumState solve_equilibrium(const Mechanism& mech, const ReportDistribution& d,
                                   const population::ConductConfig& conduct, const numerics::SolverOptions& opts = {});

// Central differences of the aggregate shares, step rel_step * (upper - lower) per coordinate.
Mat clearing_jacobian_fd(const Mechanism& mech, const ReportDistribution& d, const Vec& c0, double rel_step = 1e-5);

Vec aggregate_shares_at(const Mechanism& mech, const ReportDistribution& d, const Vec& c);

// Largest over smallest singular value; infinity for a singular matrix.
double condition_number(const Mat& m);

} // namespace mpelab::clearing

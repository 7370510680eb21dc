#pragma once

#include <string>
#include <vector>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/population/sampling.hpp"

namespace mpelab::externality {

using clearing::EquilibriumState;
using mechanism::Mat;
using mechanism::Mechanism;
using mechanism::OutcomeField;
using mechanism::ReportDistribution;
using mechanism::Vec;

// One reallocation j -> k across a cut, pooled over report types. For the two-school
// mechanism these are the rho_{j->k} and tau_{j->k} of each school's margin.
struct Margin {
    int coord = 0;
    int clearing = 0;
    int a_plus = 0;
    int a_minus = 0;
    double location = 0.0;    // c[clearing]
    double density = 0.0;     // boundary density
    double share_jump = 0.0;  // mean jump in mu_{a_plus} along the boundary
    double mean_jump = 0.0;   // mean jump of sum_a m_a mu_a
    double tau = 0.0;         // m_{a_plus} - m_{a_minus} at the boundary
};

struct WelfareGradient {
    std::string mode = "oracle";
    Vec grad;
    Vec boundary;
    Vec inframarginal;
    std::vector<Margin> margins;
};

// nabla_c U at the equilibrium, with the outcome entering through `field` (Y, or a conditional influence function).
WelfareGradient welfare_gradient(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                 const OutcomeField& field);

// Estimated mode: each margin's tau from local-linear RDD fits on the assigned agents, the boundary
// geometry from the report law, and the inframarginal term as the sample mean of Y d_c mu_A / mu_A.
WelfareGradient welfare_gradient_estimated(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                           const population::AgentTable& agents, double bandwidth_scale = 1.0);

// Fixed-population welfare U(c, P) = sum_a integral field_a mu_a(r, c, P) dP.
double fixed_population_welfare(const Mechanism& mech, const ReportDistribution& d, const Vec& c, const OutcomeField& field);

} // namespace mpelab::externality

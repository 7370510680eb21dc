#pragma once

#include <vector>

#include "mpelab/welfare/mpe.hpp"

namespace mpelab::welfare {

struct WaldResult {
    double estimate = 0.0;
    double se = 0.0;
    double first_stage = 0.0;  // Cov(W, Z)
};

// Cov(Psi_total, Z) / Cov(W, Z) from the agents, with an influence-function standard error.
// Throws EstimationError when |Cov(W, Z)| <= min_first_stage.
WaldResult wald_psi(const std::vector<double>& psi_total, const population::AgentTable& agents,
                    double min_first_stage = 1e-3);

// The same ratio by quadrature at the baseline.
double wald_psi_oracle(const AnalyticModel& m);

// MTE_Psi(xi) = E[Psi(1) - Psi(0) | xi] at the baseline; oracle only, xi is latent.
double mte_psi(const AnalyticModel& m, double xi);

struct ComplierAverage {
    double p0 = 0.0, p1 = 0.0;
    double value = 0.0;              // quadrature average of MTE_Psi over [p0, p1]
    std::vector<double> xi, mte;     // curve over (0, 1)
};

ComplierAverage complier_average(const AnalyticModel& m, int curve_points = 101);

// Mean of MTE_Psi(xi_i) over the sampled compliers.
double simulated_complier_average(const AnalyticModel& m, const population::AgentTable& agents);

struct IttResult {
    double estimate = 0.0;
    double se = 0.0;
};

// mean((Psi_total - mean Psi) s_Z(Z_i)).
IttResult itt_psi(const std::vector<double>& psi_total, const population::AgentTable& agents,
                  const population::PolicyScore& s_z);

} // namespace mpelab::welfare

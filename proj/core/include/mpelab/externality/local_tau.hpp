#pragma once

#include <cstddef>
#include <string>

#include "mpelab/externality/welfare_gradient.hpp"

namespace mpelab::externality {

struct LocalTau {
    std::string mode;
    double tau = 0.0;
    double se = 0.0;
    double bandwidth = 0.0;
    std::size_t n_minus = 0;
    std::size_t n_plus = 0;
};

LocalTau local_tau_oracle(const WelfareGradient& grad, std::size_t margin);

// Fuzzy local-linear RDD on agents crossing the margin: triangular kernel, bandwidth
// scale * 1.06 sd n^{-1/5} of the running variable. Throws EstimationError with fewer
// than 50 agents inside the bandwidth on either side.
LocalTau local_tau_estimated(const population::AgentTable& agents, const Mechanism& mech, const ReportDistribution& d,
                             const Vec& c, const Margin& margin, double bandwidth_scale = 1.0);

} // namespace mpelab::externality

#pragma once

#include <cstdint>
#include <string>

#include "mpelab/clearing/equilibrium.hpp"

namespace mpelab::clearing {

// Cutoffs (c11, c12, c21, c22) of two-school TTC with uniform priorities and preference
// shares (pi1, 1 - pi1). The pointer path is gamma(t) = (1 - t, gamma_2(t)):
//   linear:        gamma_2 = 1 - (pi2 / pi1) t
//   trade_balance: gamma_2 = (1 - t)^(pi2 / pi1), which balances the two trading flows exactly.
struct TTCCutoffs {
    Vec c;                 // ordered by TTCParametric::index
    double stop_time = 0.0;
    bool relabelled = false;  // school 2 filled first; schools were swapped for the computation
    bool flag = false;        // the second-round cutoff hit zero
    std::string path;
};

TTCCutoffs ttc_parametric_cutoffs(double pi1, double q1, double q2, const std::string& path = "linear");

// Exact discrete two-school TTC among n agents with i.i.d. uniform priorities; cutoffs are
// the pointer positions when each school fills.
Vec simulate_ttc_cutoffs(double pi1, double q1, double q2, std::size_t n, std::uint64_t seed);

EquilibriumState solve_ttc_path(const Mechanism& mech, const ReportDistribution& d, const Vec& q,
                                const std::string& path);

} // namespace mpelab::clearing

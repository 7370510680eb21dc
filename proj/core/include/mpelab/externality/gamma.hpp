#pragma once

#include <vector>

#include "mpelab/externality/welfare_gradient.hpp"

namespace mpelab::externality {

// gamma(r') = integral over r >= max(c, r') of sum_k dens_k(r) [field_1 - field_0](r) (n - 1) F(r)^{n-2} dr:
// the expected effect on the competitor an agent reporting r' displaces. Zero when the
// mechanism's smooth part ignores the report distribution.
class CompetitionGamma {
public:
    CompetitionGamma() = default;
    CompetitionGamma(double c, double hi, std::vector<double> x, std::vector<double> value, std::vector<double> slope);

    bool is_zero() const { return x_.empty(); }
    double at(double r) const;
    double operator()(const Report& r) const { return at(r.x[0]); }
    double cutoff() const { return c_; }

private:
    double c_ = 0.0, hi_ = 0.0;
    std::vector<double> x_, value_, slope_;
};

CompetitionGamma competition_gamma(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                   const OutcomeField& field);

struct PairGamma {
    std::vector<double> probes;
    std::vector<double> gamma;
    std::vector<double> se;
    double clip_rate = 0.0;  // share of eligible agents whose weight 1 / mu_A hit the cap
};

// gamma(r') = E[Y L_A(R, r') / mu_A(R)] from the assigned agents, over eligible agents only.
PairGamma gamma_pair_estimator(const population::AgentTable& agents, const Mechanism& mech, const ReportDistribution& d,
                               const Vec& c, const std::vector<double>& probes, double clip = 1e6);

} // namespace mpelab::externality

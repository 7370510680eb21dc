#include "mpelab/externality/welfare_gradient.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "mpelab/errors.hpp"
#include "mpelab/externality/local_tau.hpp"

namespace mpelab::externality {

using mechanism::make_grid;

double fixed_population_welfare(const Mechanism& mech, const ReportDistribution& d, const Vec& c, const OutcomeField& field)
{
    return mechanism::integrate_welfare(d, make_grid(d, &mech, &c), mech, c, field);
}

namespace {

std::vector<Margin> pool_margins(const mechanism::CDerivative& cd, const Vec& c)
{
    std::map<std::tuple<int, int, int, int>, Margin> pooled;
    for (const auto& s : cd.segments) {
        auto& m = pooled[{s.clearing, s.coord, s.a_plus, s.a_minus}];
        m.coord = s.coord;
        m.clearing = s.clearing;
        m.a_plus = s.a_plus;
        m.a_minus = s.a_minus;
        m.location = c[s.clearing];
        m.density += s.density;
        m.share_jump += s.share_jump;
        m.mean_jump += s.jump;
    }
    std::vector<Margin> out;
    for (auto& [key, m] : pooled) {
        if (!(m.density > 0.0)) continue;
        m.share_jump /= m.density;
        m.mean_jump /= m.density;
        m.tau = m.share_jump != 0.0 ? m.mean_jump / m.share_jump : 0.0;
        out.push_back(m);
    }
    return out;
}

} // namespace

WelfareGradient welfare_gradient(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                 const OutcomeField& field)
{
    if (!mech.supports_gradient())
        throw ConfigError(mech.id() + ": the welfare gradient is not available for this mechanism");
    const auto grid = make_grid(d, &mech, &state.c);
    const auto cd = mechanism::c_derivative(d, grid, mech, state.c, field);
    WelfareGradient g;
    g.boundary = cd.boundary;
    g.inframarginal = cd.inframarginal;
    g.grad = cd.total();
    g.margins = pool_margins(cd, state.c);
    for (const auto& cut : mech.cuts()) {
        bool seen = false;
        for (const auto& m : g.margins) seen = seen || m.clearing == cut.clearing;
        if (!seen) throw DomainError(mech.id() + ": zero boundary density at clearing coordinate " + std::to_string(cut.clearing));
    }
    return g;
}

WelfareGradient welfare_gradient_estimated(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                           const population::AgentTable& agents, double bandwidth_scale)
{
    if (!agents.assigned()) throw ConfigError("welfare_gradient_estimated needs assigned agents");
    // The boundary geometry does not involve outcomes: the indicator field gives densities and share jumps.
    const int dim = mech.clearing_dim();
    mechanism::IndicatorField none(mech.allocations(), -1);
    WelfareGradient g = welfare_gradient(mech, d, state, none);
    g.mode = "estimated";
    g.boundary = Vec::Zero(dim);
    for (auto& m : g.margins) {
        const LocalTau t = local_tau_estimated(agents, mech, d, state.c, m, bandwidth_scale);
        m.tau = t.tau;
        m.mean_jump = m.share_jump * t.tau;
        g.boundary[m.clearing] -= m.density * m.mean_jump;
    }
    g.inframarginal = Vec::Zero(dim);
    if (mech.smooth_depends_on_c()) {
        const std::size_t n = agents.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int a = agents.a[i];
            const double mu = mech.allocation(agents.report[i], state.c, d)[static_cast<std::size_t>(a)];
            if (mu <= 0.0) continue;
            const Mat sj = mech.smooth_jacobian(agents.report[i], state.c, d);
            g.inframarginal += (agents.y[i] / mu) * sj.row(a).transpose();
        }
        g.inframarginal /= static_cast<double>(n);
    }
    g.grad = g.boundary + g.inframarginal;
    return g;
}

} // namespace mpelab::externality

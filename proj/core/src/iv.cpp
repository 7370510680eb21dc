#include "mpelab/welfare/iv.hpp"

#include <cmath>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/quadrature.hpp"

namespace mpelab::welfare {

using population::PolicyLaw;

namespace {

void require_instrument(const PolicyLaw& law)
{
    if (law.family() != PolicyLaw::Family::instrument) throw ConfigError("IV analysis needs an instrument policy law");
}

// The report law of the arm W = w; components of an instrument scenario are keyed on w alone.
const population::ConditionalReportLaw& arm_law(const AnalyticModel& m, double w)
{
    for (const auto& c : m.pop->components())
        if (c.point.w == w) return c.law;
    throw DomainError("no policy atom with W = " + std::to_string(w));
}

} // namespace

WaldResult wald_psi(const std::vector<double>& psi_total, const population::AgentTable& agents, double min_first_stage)
{
    const std::size_t n = agents.size();
    if (!agents.has_z || psi_total.size() != n || n < 2) throw ConfigError("Wald estimate needs z and Psi per agent");
    double mz = 0.0, mw = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mz += agents.policy[i].z;
        mw += agents.policy[i].w;
        mp += psi_total[i];
    }
    const double dn = static_cast<double>(n);
    mz /= dn;
    mw /= dn;
    mp /= dn;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = agents.policy[i].z - mz;
        num += (psi_total[i] - mp) * dz;
        den += (agents.policy[i].w - mw) * dz;
    }
    num /= dn;
    den /= dn;
    if (std::abs(den) <= min_first_stage)
        throw EstimationError("weak instrument: |Cov(W, Z)| = " + std::to_string(std::abs(den)));
    WaldResult r;
    r.first_stage = den;
    r.estimate = num / den;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = agents.policy[i].z - mz;
        const double inf = ((psi_total[i] - mp) - r.estimate * (agents.policy[i].w - mw)) * dz / den;
        s2 += inf * inf;
    }
    r.se = std::sqrt(s2 / dn / dn);
    return r;
}

double wald_psi_oracle(const AnalyticModel& m)
{
    const auto& law = m.pop->spec().policy_law;
    require_instrument(law);
    const double pz = law.instrument_prob();
    // Cov(., Z) = E[. (Z - pi)], a score-weighted moment.
    population::PolicyScore centred("z_centred", population::PolicyScore::Kind::smooth,
                                    [pz](const PolicyPoint& p) { return p.z - pz; });
    const double num = mpe_covariance(m, centred).total();
    double den = 0.0;
    for (const auto& a : m.pop->atoms()) den += a.weight * a.point.w * (a.point.z - pz);
    return num / den;
}

double mte_psi(const AnalyticModel& m, double xi)
{
    PolicyPoint p1, p0;
    p1.w = 1.0;
    p1.xi = xi;
    p0.xi = xi;
    return conditional_psi(m, p1, arm_law(m, 1.0)) - conditional_psi(m, p0, arm_law(m, 0.0));
}

ComplierAverage complier_average(const AnalyticModel& m, int curve_points)
{
    const auto& law = m.pop->spec().policy_law;
    require_instrument(law);
    ComplierAverage out;
    out.p0 = std::min(law.p_at(0), law.p_at(1));
    out.p1 = std::max(law.p_at(0), law.p_at(1));
    if (!(out.p1 > out.p0)) throw EstimationError("the instrument moves nobody; the complier window is empty");
    out.value = numerics::gauss_legendre([&](double xi) { return mte_psi(m, xi); }, out.p0, out.p1) / (out.p1 - out.p0);
    for (int i = 0; i < curve_points; ++i) {
        const double xi = (i + 0.5) / curve_points;
        out.xi.push_back(xi);
        out.mte.push_back(mte_psi(m, xi));
    }
    return out;
}

double simulated_complier_average(const AnalyticModel& m, const population::AgentTable& agents)
{
    const auto& law = m.pop->spec().policy_law;
    require_instrument(law);
    if (!agents.has_xi) throw ConfigError("simulated complier average needs xi per agent");
    const double lo = std::min(law.p_at(0), law.p_at(1)), hi = std::max(law.p_at(0), law.p_at(1));
    // MTE on a fine grid, linearly interpolated: one report integral per node instead of per agent.
    constexpr int kNodes = 513;
    std::vector<double> table(kNodes);
    const double h = (hi - lo) / (kNodes - 1);
    for (int i = 0; i < kNodes; ++i) table[static_cast<std::size_t>(i)] = mte_psi(m, lo + h * i);
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& p : agents.policy)
        if (p.xi >= lo && p.xi < hi) {
            const double u = (p.xi - lo) / h;
            const auto i = std::min(static_cast<std::size_t>(u), static_cast<std::size_t>(kNodes - 2));
            const double t = u - static_cast<double>(i);
            s += (1.0 - t) * table[i] + t * table[i + 1];
            ++n;
        }
    if (n == 0) throw EstimationError("no compliers in the sample");
    return s / static_cast<double>(n);
}

IttResult itt_psi(const std::vector<double>& psi_total, const population::AgentTable& agents,
                  const population::PolicyScore& s_z)
{
    const std::size_t n = agents.size();
    if (!agents.has_z || psi_total.size() != n || n < 2) throw ConfigError("ITT needs z and Psi per agent");
    // Psi is centred first; E[s_Z] = 0 makes this the same estimand with far less variance.
    double mp = 0.0;
    for (double v : psi_total) mp += v;
    mp /= static_cast<double>(n);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (psi_total[i] - mp) * s_z(agents.policy[i]);
        s += v;
        s2 += v * v;
    }
    const double dn = static_cast<double>(n);
    IttResult r;
    r.estimate = s / dn;
    r.se = std::sqrt(std::max(0.0, s2 / dn - r.estimate * r.estimate) / (dn - 1.0));
    return r;
}

} // namespace mpelab::welfare

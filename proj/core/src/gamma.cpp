#include "mpelab/externality/gamma.hpp"

#include <algorithm>
#include <cmath>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/quadrature.hpp"

namespace mpelab::externality {

CompetitionGamma::CompetitionGamma(double c, double hi, std::vector<double> x, std::vector<double> value,
                                   std::vector<double> slope)
    : c_(c), hi_(hi), x_(std::move(x)), value_(std::move(value)), slope_(std::move(slope))
{
}

double CompetitionGamma::at(double r) const
{
    if (is_zero()) return 0.0;
    const double x = std::clamp(r, c_, hi_);
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin(), 1)) - 1;
    i = std::min(i, x_.size() - 2);
    // Cubic Hermite on [x_i, x_{i+1}].
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * value_[i] + (t3 - 2 * t2 + t) * h * slope_[i] + (-2 * t3 + 3 * t2) * value_[i + 1] +
           (t3 - t2) * h * slope_[i + 1];
}

CompetitionGamma competition_gamma(const Mechanism& mech, const ReportDistribution& d, const EquilibriumState& state,
                                   const OutcomeField& field)
{
    if (!mech.smooth_depends_on_distribution()) return {};
    if (d.space().n_cont != 1 || mech.allocations() != 2)
        throw ConfigError(mech.id() + ": the competition term is implemented for one bid and two allocations");
    const double c = state.c[0], hi = d.space().hi[0];
    const std::size_t nk = d.components();
    auto g = [&](double x) {
        Report r;
        r.x[0] = x;
        double s = 0.0;
        for (std::size_t k = 0; k < nk; ++k) {
            const double dens = d.density(k, r);
            if (dens != 0.0) s += dens * (field.value(k, 1, r) - field.value(k, 0, r));
        }
        return s * mech.kernel_envelope(r, state.c, d);
    };
    // Gamma(x) = integral_x^hi g; Gamma' = -g.
    const int cells = 1024;
    std::vector<double> x(cells + 1), value(cells + 1), slope(cells + 1);
    for (int i = 0; i <= cells; ++i) x[static_cast<std::size_t>(i)] = c + (hi - c) * i / cells;
    x[static_cast<std::size_t>(cells)] = hi;
    value[static_cast<std::size_t>(cells)] = 0.0;
    for (int i = cells - 1; i >= 0; --i) {
        const std::size_t u = static_cast<std::size_t>(i);
        value[u] = value[u + 1] + numerics::gauss_legendre(g, x[u], x[u + 1]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) slope[i] = -g(x[i]);
    // The envelope switches on at c; use the one-sided slope there.
    slope[0] = -g(c);
    return CompetitionGamma(c, hi, std::move(x), std::move(value), std::move(slope));
}

PairGamma gamma_pair_estimator(const population::AgentTable& agents, const Mechanism& mech, const ReportDistribution& d,
                               const Vec& c, const std::vector<double>& probes, double clip)
{
    if (!agents.assigned()) throw ConfigError("gamma_pair_estimator needs assigned agents");
    PairGamma out;
    out.probes = probes;
    const std::size_t n = agents.size();
    if (!mech.smooth_depends_on_distribution()) {
        out.gamma.assign(probes.size(), 0.0);
        out.se.assign(probes.size(), 0.0);
        return out;
    }
    // Per-agent pieces reused across probes.
    std::vector<double> weight(n, 0.0), env(n, 0.0);
    std::size_t eligible = 0, clipped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Report& r = agents.report[i];
        const double e = mech.kernel_envelope(r, c, d);
        if (e == 0.0) continue;
        const int a = agents.a[i];
        const double mu = mech.allocation(r, c, d)[static_cast<std::size_t>(a)];
        ++eligible;
        double w = mu > 0.0 ? 1.0 / mu : clip;
        if (w >= clip) {
            w = clip;
            ++clipped;
        }
        // L_1 = envelope, L_0 = -envelope.
        weight[i] = (a == 1 ? 1.0 : -1.0) * w;
        env[i] = e;
    }
    out.clip_rate = eligible ? static_cast<double>(clipped) / static_cast<double>(eligible) : 0.0;
    for (double p : probes) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (env[i] == 0.0 || agents.report[i].x[0] < p) continue;
            const double v = agents.y[i] * env[i] * weight[i];
            s += v;
            s2 += v * v;
        }
        const double m = s / static_cast<double>(n);
        out.gamma.push_back(m);
        out.se.push_back(std::sqrt(std::max(0.0, s2 / static_cast<double>(n) - m * m) / static_cast<double>(n)));
    }
    return out;
}

} // namespace mpelab::externality

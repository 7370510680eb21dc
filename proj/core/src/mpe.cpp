#include "mpelab/welfare/mpe.hpp"

#include <cmath>

#include "mpelab/errors.hpp"

namespace mpelab::welfare {

numerics::SolverOptions solver_options(const population::SolverConfig& cfg)
{
    numerics::SolverOptions o;
    o.max_iter = cfg.max_iter;
    o.tol = cfg.tol;
    return o;
}

mechanism::OutcomeFieldPtr AnalyticModel::weighted_field(const std::vector<double>& lambda) const
{
    return functional->field(*d, &lambda);
}

std::vector<double> AnalyticModel::score_values(const population::PolicyScore& s) const
{
    return pop->score_values(s);
}

std::shared_ptr<AnalyticModel> build_model(const population::Population& pop, const FunctionalSpec& functional)
{
    auto m = std::make_shared<AnalyticModel>();
    const auto& spec = pop.spec();
    m->pop = &pop;
    m->mech = mechanism::make_mechanism(spec.mechanism);
    m->mech->check_space(pop.space());
    m->d = std::make_unique<ReportDistribution>(pop);
    m->state = clearing::solve_equilibrium(*m->mech, *m->d, spec.conduct, solver_options(spec.solver));
    m->grid = mechanism::make_grid(*m->d, m->mech.get(), &m->state.c);
    m->functional = std::make_unique<WelfareFunctional>(functional, *m->mech, *m->d, m->state.c, pop.outcome());
    m->field = m->functional->field(*m->d);
    m->supports_mpe = m->mech->supports_gradient() && m->state.rule != "ttc_path";
    if (!m->supports_mpe) return m;

    m->gradient = externality::welfare_gradient(*m->mech, *m->d, m->state, *m->field);
    m->gamma = externality::competition_gamma(*m->mech, *m->d, m->state, *m->field);
    clearing::InfluenceFunction psi =
        m->state.rule == "myerson"
            ? clearing::sturm_liouville_representer(*m->d, m->state.c[0], spec.solver.grid_nodes)
            : clearing::influence_function_L2(m->state, *m->mech, *m->d);
    m->conduct = externality::ConductTerm(m->gradient.grad, std::move(psi), *m->mech, m->state);
    return m;
}

void apply_tau_offset(AnalyticModel& m, double delta)
{
    if (!m.supports_mpe || delta == 0.0) return;
    for (auto& mg : m.gradient.margins) {
        mg.tau += delta;
        mg.mean_jump += mg.share_jump * delta;
        m.gradient.boundary[mg.clearing] -= mg.density * mg.share_jump * delta;
    }
    m.gradient.grad = m.gradient.boundary + m.gradient.inframarginal;
    m.conduct = externality::ConductTerm(m.gradient.grad, m.conduct.psi(), *m.mech, m.state);
}

namespace {

void require_mpe(const AnalyticModel& m)
{
    if (!m.supports_mpe)
        throw ConfigError("mechanism '" + m.mech->id() + "' has no welfare gradient; the MPE is not available");
}

MpeComponents fixed_part(const AnalyticModel& m, const std::vector<double>& lambda)
{
    MpeComponents out;
    out.direct = mechanism::integrate_welfare(*m.d, m.grid, *m.mech, m.state.c, *m.weighted_field(lambda));
    if (!m.gamma.is_zero()) {
        const auto mass = m.d->component_mass(lambda);
        out.competition = mechanism::report_moment(
            *m.d, m.grid, [&](const Report& r) { return m.gamma(r); }, mass);
    }
    return out;
}

} // namespace

MpeComponents mpe_covariance(const AnalyticModel& m, const population::PolicyScore& s)
{
    require_mpe(m);
    if (m.conduct.is_h1())
        throw ConfigError("the conduct term of '" + m.state.rule +
                          "' has no L2 representer; use the general MPE with the Sobolev pairing");
    const auto lambda = m.score_values(s);
    MpeComponents out = fixed_part(m, lambda);
    const auto mass = m.d->component_mass(lambda);
    out.conduct = mechanism::report_moment(
        *m.d, m.grid, [&](const Report& r) { return m.conduct(r); }, mass);
    return out;
}

mechanism::Vec conduct_derivative(const AnalyticModel& m, const population::ReportScore& s_r)
{
    require_mpe(m);
    return m.conduct.psi().pairing(*m.d, s_r);
}

MpeComponents mpe_general(const AnalyticModel& m, const population::PolicyScore& s)
{
    require_mpe(m);
    MpeComponents out = fixed_part(m, m.score_values(s));
    const auto s_r = mechanism::induced_report_score(*m.d, s);
    out.conduct = m.gradient.grad.dot(conduct_derivative(m, s_r));
    out.pairing = m.conduct.is_h1() ? "H1" : "L2";
    return out;
}

double conditional_psi(const AnalyticModel& m, const PolicyPoint& p, const population::ConditionalReportLaw& law)
{
    require_mpe(m);
    if (m.conduct.is_h1()) throw ConfigError("conditional Psi needs an L2 conduct term");
    const auto& outcome = m.pop->outcome();
    const bool mean = m.functional->spec().kind == "mean";
    const int na = m.mech->allocations();
    double total = 0.0;
    mechanism::visit_law(law, m.grid, [&](const Report& r, double w) {
        const auto mu = m.mech->allocation(r, m.state.c, *m.d);
        double v = m.gamma.is_zero() ? 0.0 : m.gamma(r);
        v += m.conduct(r);
        for (int a = 0; a < na; ++a) {
            const double ma = mu[static_cast<std::size_t>(a)];
            if (ma == 0.0) continue;
            const double y = outcome.mean(p, a, r);
            v += ma * (mean ? y : m.functional->conditional_influence(y));
        }
        total += w * v;
    });
    return total;
}

MpeComponents mpe_sample(const externality::PsiDecomposition& psi, const population::AgentTable& agents,
                         const population::PolicyScore& s)
{
    const std::size_t n = psi.size();
    if (n < 2 || agents.size() != n) throw ConfigError("sample MPE needs the Psi columns of every agent");
    if (psi.conduct_h1) throw ConfigError("sample MPE: the conduct term needs the Sobolev pairing");
    MpeComponents out;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sw = s(agents.policy[i]);
        out.direct += psi.y[i] * sw;
        out.competition += psi.gamma[i] * sw;
        out.conduct += psi.psi_conduct[i] * sw;
        const double t = psi.psi_total[i] * sw;
        sum += t;
        sum2 += t * t;
    }
    const double dn = static_cast<double>(n);
    out.direct /= dn;
    out.competition /= dn;
    out.conduct /= dn;
    const double mean = sum / dn;
    out.se = std::sqrt(std::max(0.0, sum2 / dn - mean * mean) / (dn - 1.0));
    return out;
}

} // namespace mpelab::welfare

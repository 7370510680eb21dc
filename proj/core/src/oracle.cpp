#include "mpelab/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpelab/errors.hpp"
#include "mpelab/mechanism/assign.hpp"

namespace mpelab::oracle {

namespace {

numerics::SolverOptions tight(const Population& pop, const OracleConfig& cfg)
{
    auto o = welfare::solver_options(pop.spec().solver);
    o.tol = std::min(o.tol, cfg.solve_tol);
    o.max_iter = std::max(o.max_iter, 400);
    return o;
}

// Shrinks the steps so that theta stays admissible along the whole path.
std::vector<double> admissible_steps(std::vector<double> steps, double sup_abs_score)
{
    if (steps.empty()) throw ConfigError("oracle: no finite-difference steps");
    const double limit = sup_abs_score > 0.0 ? 0.5 / sup_abs_score : std::numeric_limits<double>::infinity();
    const double scale = steps.front() > limit ? limit / steps.front() : 1.0;
    for (double& h : steps) h *= scale;
    return steps;
}

clearing::EquilibriumState solve_at(const mechanism::Mechanism& mech, const ReportDistribution& d, const Population& pop,
                                    const OracleConfig& cfg)
{
    return clearing::solve_equilibrium(mech, d, pop.spec().conduct, tight(pop, cfg));
}

} // namespace

FdResult richardson(const std::function<double(double)>& f, const std::vector<double>& steps, double scale)
{
    FdResult r;
    r.mode = "quadrature";
    r.steps = steps;
    for (double h : steps) r.central.push_back((f(h) - f(-h)) / (2.0 * h));
    const auto& D = r.central;
    if (D.size() == 1) {
        r.value = D[0];
        return r;
    }
    // Extrapolation assumes the steps halve.
    std::vector<double> R;
    for (std::size_t i = 0; i + 1 < D.size(); ++i) R.push_back((4.0 * D[i + 1] - D[i]) / 3.0);
    r.value = R.back();
    r.error_estimate = R.size() > 1 ? std::abs(R.back() - R[R.size() - 2]) : std::abs(D.back() - D[D.size() - 2]);
    const double roundoff = 1e-10 * std::max(1.0, scale);
    const double d1 = std::abs(D[0] - D[1]);
    if (D.size() >= 3) {
        const double d2 = std::abs(D[1] - D[2]);
        if (d1 < roundoff && d2 < roundoff) {
            r.exact = true;
            r.value = D.back();
        } else {
            r.order = std::log2(d1 / d2);
            r.order_ok = r.order >= 1.9 && r.order <= 2.1;
        }
    } else if (d1 < roundoff) {
        r.exact = true;
    }
    return r;
}

double welfare_at(const Population& pop, const FunctionalSpec& f, const population::PolicyScore& s, double theta,
                  const OracleConfig& cfg, Vec* c_out)
{
    const auto mech = mechanism::make_mechanism(pop.spec().mechanism);
    const ReportDistribution d(pop, pop.perturbed_weights(s, theta));
    const auto st = solve_at(*mech, d, pop, cfg);
    if (c_out) *c_out = st.c;
    return welfare::functional_value(f, *mech, d, st.c, pop.outcome());
}

namespace {

FdResult fd_mpe_mc(const Population& pop, const FunctionalSpec& f, const population::PolicyScore& s,
                   const OracleConfig& cfg, double h)
{
    if (f.kind != "mean") throw ConfigError("the Monte Carlo oracle supports the mean functional only");
    const auto& spec = pop.spec();
    const auto mech = mechanism::make_mechanism(spec.mechanism);
    auto agents = population::sample_population(spec, cfg.mc_samples, cfg.seed);
    std::vector<double> y_plus, y_minus;
    for (int sign : {1, -1}) {
        const double theta = sign * h;
        const ReportDistribution d(pop, pop.perturbed_weights(s, theta));
        const auto st = solve_at(*mech, d, pop, cfg);
        const std::uint64_t seed = cfg.coupling || sign > 0 ? cfg.seed : cfg.seed + 1;
        mechanism::assign(*mech, agents, st.c, d, pop.outcome(), seed);
        (sign > 0 ? y_plus : y_minus) = agents.y;
    }
    const std::size_t n = agents.size();
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double si = s(agents.policy[i]);
        const double di = ((1.0 + h * si) * y_plus[i] - (1.0 - h * si) * y_minus[i]) / (2.0 * h);
        sum += di;
        sum2 += di * di;
    }
    FdResult r;
    r.mode = "mc";
    r.steps = {h};
    const double dn = static_cast<double>(n);
    r.value = sum / dn;
    r.central = {r.value};
    r.se = std::sqrt(std::max(0.0, sum2 / dn - r.value * r.value) / (dn - 1.0));
    return r;
}

} // namespace

FdResult fd_mpe(const Population& pop, const FunctionalSpec& f, const population::PolicyScore& s, const OracleConfig& cfg)
{
    const auto steps = admissible_steps(cfg.steps, population::score_sup_abs(s, pop.atoms()));
    if (cfg.mode == "mc") return fd_mpe_mc(pop, f, s, cfg, steps.front());
    if (cfg.mode != "quadrature") throw ConfigError("unknown oracle mode '" + cfg.mode + "'");
    const double base = welfare_at(pop, f, s, 0.0, cfg);
    return richardson([&](double t) { return welfare_at(pop, f, s, t, cfg); }, steps, std::abs(base));
}

FdVector fd_gradient_c(const AnalyticModel& m, double rel_step)
{
    const auto& c0 = m.state.c;
    const auto lo = m.mech->lower_bound(m.pop->space());
    const auto hi = m.mech->upper_bound(m.pop->space());
    FdVector out{Vec::Zero(c0.size()), Vec::Zero(c0.size())};
    for (Eigen::Index l = 0; l < c0.size(); ++l) {
        const double h0 = rel_step * (hi[l] - lo[l]);
        auto diff = [&](double h) {
            Vec cp = c0, cm = c0;
            cp[l] += h;
            cm[l] -= h;
            return (externality::fixed_population_welfare(*m.mech, *m.d, cp, *m.field) -
                    externality::fixed_population_welfare(*m.mech, *m.d, cm, *m.field)) /
                   (2.0 * h);
        };
        const double D1 = diff(h0), D2 = diff(0.5 * h0);
        out.value[l] = (4.0 * D2 - D1) / 3.0;
        out.error_estimate[l] = std::abs(D2 - D1);
    }
    return out;
}

FdVector fd_conduct_derivative(const AnalyticModel& m, const population::ReportScore& s_r, const OracleConfig& cfg)
{
    double sup = 0.0;
    mechanism::visit(*m.d, m.grid, [&](const Report& r, double, const double*) { sup = std::max(sup, std::abs(s_r(r))); });
    const auto steps = admissible_steps(cfg.steps, sup);
    const Eigen::Index dim = m.state.c.size();
    std::vector<std::vector<double>> central(static_cast<std::size_t>(dim));
    for (double h : steps) {
        const auto cp = solve_at(*m.mech, m.d->tilted(s_r, h), *m.pop, cfg).c;
        const auto cm = solve_at(*m.mech, m.d->tilted(s_r, -h), *m.pop, cfg).c;
        for (Eigen::Index l = 0; l < dim; ++l)
            central[static_cast<std::size_t>(l)].push_back((cp[l] - cm[l]) / (2.0 * h));
    }
    FdVector out{Vec::Zero(dim), Vec::Zero(dim)};
    for (Eigen::Index l = 0; l < dim; ++l) {
        const auto& D = central[static_cast<std::size_t>(l)];
        if (D.size() == 1) {
            out.value[l] = D[0];
            continue;
        }
        std::vector<double> R;
        for (std::size_t i = 0; i + 1 < D.size(); ++i) R.push_back((4.0 * D[i + 1] - D[i]) / 3.0);
        out.value[l] = R.back();
        out.error_estimate[l] = R.size() > 1 ? std::abs(R.back() - R[R.size() - 2]) : std::abs(D[1] - D[0]);
    }
    return out;
}

FdResult fd_partial_competition(const AnalyticModel& m, const population::PolicyScore& s, const OracleConfig& cfg)
{
    const auto steps = admissible_steps(cfg.steps, population::score_sup_abs(s, m.pop->atoms()));
    const double base = std::abs(mechanism::integrate_welfare(*m.d, m.grid, *m.mech, m.state.c, *m.field));
    return richardson(
        [&](double t) {
            const ReportDistribution dt(*m.pop, m.pop->perturbed_weights(s, t));
            return mechanism::integrate_welfare(*m.d, m.grid, *m.mech, m.state.c, *m.field, &dt);
        },
        steps, base);
}

} // namespace mpelab::oracle

#include "mpelab/population/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpelab/errors.hpp"

namespace mpelab::population {

PolicyScore::PolicyScore(std::string id, Kind kind, std::function<double(const PolicyPoint&)> f,
                         std::function<double(const PolicyPoint&)> df)
    : id_(std::move(id)), kind_(kind), f_(std::move(f)), df_(std::move(df))
{
}

double PolicyScore::derivative(const PolicyPoint& p) const
{
    if (!df_) throw ConfigError("score '" + id_ + "' has no derivative");
    return df_(p);
}

PolicyScore PolicyScore::scaled(double s) const
{
    auto f = f_;
    auto df = df_;
    std::function<double(const PolicyPoint&)> sdf;
    if (df) sdf = [df, s](const PolicyPoint& p) { return s * df(p); };
    return PolicyScore(id_, kind_, [f, s](const PolicyPoint& p) { return s * f(p); }, sdf);
}

double score_mean(const PolicyScore& s, const std::vector<PolicyAtom>& atoms)
{
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight * s(a.point);
    return m;
}

double score_second_moment(const PolicyScore& s, const std::vector<PolicyAtom>& atoms)
{
    double m = 0.0;
    for (const auto& a : atoms) {
        const double v = s(a.point);
        m += a.weight * v * v;
    }
    return m;
}

double score_sup_abs(const PolicyScore& s, const std::vector<PolicyAtom>& atoms)
{
    double m = 0.0;
    for (const auto& a : atoms)
        if (a.weight > 0.0) m = std::max(m, std::abs(s(a.point)));
    return m;
}

std::vector<PolicyAtom> perturbed_policy_atoms(const std::vector<PolicyAtom>& atoms, const PolicyScore& s, double theta)
{
    const double sup = score_sup_abs(s, atoms);
    if (std::abs(theta) * sup >= 1.0) {
        const double max_theta = sup > 0.0 ? 1.0 / sup : std::numeric_limits<double>::infinity();
        throw PathError("perturbed policy density loses positivity: |theta| must stay below " +
                            std::to_string(max_theta),
                        max_theta);
    }
    std::vector<PolicyAtom> out = atoms;
    for (auto& a : out) a.weight *= 1.0 + theta * s(a.point);
    return out;
}

PolicyLaw perturbed_policy_density(const PolicyLaw& law, const PolicyScore& s, double theta)
{
    if (!law.w_discrete()) throw ConfigError("perturbed_policy_density returns a law only for discrete policies");
    const auto atoms = perturbed_policy_atoms(law.atoms(0), s, theta);
    std::vector<double> support, probs;
    for (const auto& a : atoms) {
        support.push_back(a.point.w);
        probs.push_back(a.weight);
    }
    // The linear path preserves mass only up to the score's centring error; renormalise the rounding.
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > 1e-10) throw PathError("perturbed policy law does not integrate to one", 0.0);
    for (double& p : probs) p /= total;
    if (law.family() == PolicyLaw::Family::bernoulli) return PolicyLaw::bernoulli(probs[1]);
    return PolicyLaw::discrete(support, probs);
}

namespace {

double pick_var(const PolicyPoint& p, const std::string& v) { return v == "z" ? p.z : p.w; }

std::vector<PolicyAtom> variable_atoms(const PolicyLaw& law, const std::string& v, int nodes)
{
    return law.atoms(nodes);
    (void)v;
}

void check_variable(const PolicyLaw& law, const ScoreSpec& spec)
{
    if (spec.variable != "w" && spec.variable != "z")
        throw ConfigError("score '" + spec.id + "': variable must be 'w' or 'z'");
    if (spec.variable == "z" && law.family() != PolicyLaw::Family::instrument)
        throw ConfigError("score '" + spec.id + "': variable 'z' requires an instrument policy law");
}

} // namespace

PolicyScore make_policy_score(const ScoreSpec& spec, const PolicyLaw& law, int nodes)
{
    check_variable(law, spec);
    const std::string var = spec.variable;
    const auto atoms = variable_atoms(law, var, nodes);

    if (spec.kind == "zero") {
        return PolicyScore(spec.id, PolicyScore::Kind::smooth, [](const PolicyPoint&) { return 0.0; },
                           [](const PolicyPoint&) { return 0.0; });
    }

    if (spec.kind == "binary_shift") {
        // Mass moves from the lowest to the highest support point of the variable.
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        for (const auto& a : atoms) {
            if (a.weight <= 0.0) continue;
            vmin = std::min(vmin, pick_var(a.point, var));
            vmax = std::max(vmax, pick_var(a.point, var));
        }
        if (law.w_continuous() && var == "w")
            throw ConfigError("score '" + spec.id + "': binary_shift needs a discrete policy variable");
        if (law.family() == PolicyLaw::Family::covariate || (law.family() == PolicyLaw::Family::instrument && var == "w"))
            throw ConfigError("score '" + spec.id + "': binary_shift on w is not a valid reform for this policy law; use targeting or variable z");
        double pmin = 0.0, pmax = 0.0;
        for (const auto& a : atoms) {
            const double v = pick_var(a.point, var);
            if (v == vmin) pmin += a.weight;
            if (v == vmax) pmax += a.weight;
        }
        if (!(vmax > vmin)) throw ConfigError("score '" + spec.id + "': degenerate policy support");
        return PolicyScore(
            spec.id, PolicyScore::Kind::binary_shift,
            [=](const PolicyPoint& p) {
                const double v = pick_var(p, var);
                return (v == vmax ? 1.0 / pmax : 0.0) - (v == vmin ? 1.0 / pmin : 0.0);
            });
    }

    if (spec.kind == "tabulated") {
        if (!law.w_discrete() || var != "w") throw ConfigError("score '" + spec.id + "': tabulated scores need a discrete W");
        if (spec.coef.size() != law.support().size())
            throw ConfigError("score '" + spec.id + "': one value per support point required");
        const auto support = law.support();
        const auto values = spec.coef;
        PolicyScore s(spec.id, PolicyScore::Kind::tabulated, [=](const PolicyPoint& p) {
            for (std::size_t i = 0; i < support.size(); ++i)
                if (support[i] == p.w) return values[i];
            throw DomainError("tabulated score evaluated off the policy support");
        });
        if (std::abs(score_mean(s, atoms)) > 1e-8)
            throw ConfigError("score '" + spec.id + "': tabulated values must have mean zero under the baseline law");
        return s;
    }

    if (spec.kind == "polynomial") {
        if (spec.coef.empty()) throw ConfigError("score '" + spec.id + "': polynomial needs coefficients");
        const auto coef = spec.coef;
        auto raw = [coef, var](const PolicyPoint& p) {
            const double v = pick_var(p, var);
            double s = 0.0, pw = 1.0;
            for (double c : coef) { pw *= v; s += c * pw; }
            return s;
        };
        double mean = 0.0;
        for (const auto& a : atoms) mean += a.weight * raw(a.point);
        return PolicyScore(
            spec.id, PolicyScore::Kind::smooth, [raw, mean](const PolicyPoint& p) { return raw(p) - mean; },
            [coef, var](const PolicyPoint& p) {
                const double v = pick_var(p, var);
                double s = 0.0, pw = 1.0;
                for (std::size_t k = 0; k < coef.size(); ++k) {
                    s += coef[k] * static_cast<double>(k + 1) * pw;
                    pw *= v;
                }
                return s;
            });
    }

    if (spec.kind == "cosine") {
        const double fr = spec.freq, ph = spec.phase;
        double mean = 0.0;
        for (const auto& a : atoms) mean += a.weight * std::cos(fr * pick_var(a.point, var) + ph);
        return PolicyScore(
            spec.id, PolicyScore::Kind::smooth,
            [=](const PolicyPoint& p) { return std::cos(fr * pick_var(p, var) + ph) - mean; },
            [=](const PolicyPoint& p) { return -fr * std::sin(fr * pick_var(p, var) + ph); });
    }

    if (spec.kind == "targeting") {
        if (law.family() != PolicyLaw::Family::covariate)
            throw ConfigError("score '" + spec.id + "': targeting scores need a covariate policy law");
        const auto h = spec.direction;
        const PolicyLaw copy = law;
        return PolicyScore(spec.id, PolicyScore::Kind::smooth, [h, copy](const PolicyPoint& p) {
            const double pr = copy.propensity(p.x);
            return (p.w / pr - (1.0 - p.w) / (1.0 - pr)) * h.eval(p);
        });
    }

    throw ConfigError("score '" + spec.id + "': unknown kind '" + spec.kind + "'");
}

ReportScore::ReportScore(std::string id, std::function<double(const Report&)> f,
                         std::function<double(const Report&, int)> df, std::vector<double> kinks)
    : id_(std::move(id)), f_(std::move(f)), df_(std::move(df)), kinks_(std::move(kinks))
{
}

double ReportScore::derivative(const Report& r, int coord) const
{
    if (!f_) return 0.0;
    if (!df_) throw ConfigError("report score '" + id_ + "' carries no derivative");
    return df_(r, coord);
}

} // namespace mpelab::population

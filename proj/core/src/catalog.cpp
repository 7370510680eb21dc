#include "mpelab/lab/catalog.hpp"

#include "mpelab/errors.hpp"

namespace mpelab::lab {

using namespace population;

namespace {

Polynomial P(const std::string& s) { return parse_polynomial(s); }

CoordinateSpec legendre(std::vector<std::string> coef)
{
    CoordinateSpec c;
    c.family = CoordinateSpec::Family::legendre;
    for (const auto& k : coef) c.legendre_coef.push_back(P(k));
    return c;
}

CoordinateSpec uniform()
{
    return CoordinateSpec{};
}

ReportSpace space(int n_types, int n_cont, std::vector<std::string> labels = {})
{
    ReportSpace s;
    s.n_types = n_types;
    s.n_cont = n_cont;
    s.type_labels = std::move(labels);
    return s;
}

OutcomeLaw outcomes(std::vector<std::string> means)
{
    std::vector<Polynomial> m;
    for (const auto& s : means) m.push_back(P(s));
    return OutcomeLaw(std::move(m), NoiseLaw::normal(0.5));
}

ScoreSpec score(std::string id, std::string kind, std::vector<double> coef = {}, std::string variable = "w")
{
    ScoreSpec s;
    s.id = std::move(id);
    s.kind = std::move(kind);
    s.coef = std::move(coef);
    s.variable = std::move(variable);
    return s;
}

ScoreSpec cosine(std::string id, double freq, double phase)
{
    ScoreSpec s = score(std::move(id), "cosine");
    s.freq = freq;
    s.phase = phase;
    return s;
}

ScenarioSpec base(std::string id, std::string section, std::string description)
{
    ScenarioSpec s;
    s.id = std::move(id);
    s.section = std::move(section);
    s.description = std::move(description);
    return s;
}

const PolicyLaw kThreePoint = PolicyLaw::discrete({0.0, 1.0, 2.0}, {0.3, 0.4, 0.3});

std::vector<ScenarioSpec> build()
{
    std::vector<ScenarioSpec> out;

    {
        auto s = base("rationing", "rationing", "lottery among demanders; W raises demand and outcomes");
        s.policy_law = kThreePoint;
        s.report_law = ReportLaw(space(2, 0, {"no_demand", "demand"}), {P("0.5 - 0.2*w")}, {});
        s.outcome_law = outcomes({"0.5 + 0.4*w + 0.3*t", "1.3 + 1.0*w + 0.3*t"});
        s.mechanism.id = "random_rationing";
        s.conduct = {"capacity", {0.35}, "linear"};
        s.scores = {score("binary_shift", "binary_shift"), score("linear", "polynomial", {1.0}),
                    score("quadratic", "polynomial", {0.0, 1.0})};
        out.push_back(s);
    }
    {
        auto s = base("price_cutoff", "price", "deterministic allocation above a price; W shifts reports up");
        s.policy_law = kThreePoint;
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"-0.5 + 0.5*w"})});
        s.outcome_law = outcomes({"0.2 + 0.5*w + 0.8*r", "1.2 + 0.8*w + 1.3*r"});
        s.mechanism.id = "price_cutoff";
        s.conduct = {"capacity", {0.3}, "linear"};
        s.scores = {score("binary_shift", "binary_shift"), score("linear", "polynomial", {1.0}),
                    score("quadratic", "polynomial", {0.0, 1.0})};
        out.push_back(s);
    }
    {
        auto s = base("auction_fixed_q", "auction", "second-price auction, three bidders, reserve set to sell 25%");
        s.policy_law = kThreePoint;
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"-0.5 + 0.5*w"})});
        s.outcome_law = outcomes({"0.3 + 0.4*w + 0.6*r", "1.2 + 0.8*w + 1.1*r"});
        s.mechanism = {"second_price_auction", 3};
        s.conduct = {"capacity", {0.25}, "linear"};
        s.scores = {score("binary_shift", "binary_shift"), score("linear", "polynomial", {1.0}),
                    score("quadratic", "polynomial", {0.0, 1.0})};
        out.push_back(s);
    }
    {
        auto s = base("auction_myerson", "auction", "second-price auction, three bidders, revenue-optimal reserve");
        s.policy_law = PolicyLaw::truncated_normal(0.2, 0.5, -1.0, 1.0);
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"0.3*w", "0.15*w^2 - 0.05"})});
        s.outcome_law = outcomes({"0.3 + 0.5*w + 0.6*r", "1.1 + 0.9*w + 1.0*r"});
        s.mechanism = {"second_price_auction", 3};
        s.conduct = {"myerson", {}, "linear"};
        s.scores = {score("linear", "polynomial", {1.0}), score("quadratic", "polynomial", {0.0, 1.0}),
                    cosine("cosine", 2.0, 0.3)};
        out.push_back(s);
    }
    {
        auto s = base("two_school", "schools", "two-school deferred acceptance with score cutoffs");
        s.policy_law = kThreePoint;
        s.report_law = ReportLaw(space(6, 2, {"1>2>0", "1>0>2", "2>1>0", "2>0>1", "0>1>2", "0>2>1"}),
                                 {P("0.25 + 0.05*w"), P("0.1"), P("0.3 - 0.05*w"), P("0.1"), P("0.15")},
                                 {legendre({"0.2*(w - 1)"}), legendre({"0.1*(w - 1)"})});
        s.outcome_law = outcomes({"0.2 + 0.3*w + 0.5*r1 + 0.3*r2", "1.2 + 0.5*w + 0.9*r1 + 0.3*r2",
                                  "0.8 + 0.7*w + 0.5*r1 + 0.6*r2"});
        s.mechanism.id = "two_school_da";
        s.conduct = {"capacity", {0.25, 0.3}, "linear"};
        s.scores = {score("binary_shift", "binary_shift"), score("linear", "polynomial", {1.0}),
                    score("quadratic", "polynomial", {0.0, 1.0})};
        out.push_back(s);
    }
    {
        auto s = base("ttc_parametric", "schools", "two-school top trading cycles, uniform priorities, pi1 = 0.6");
        s.policy_law = PolicyLaw::bernoulli(0.5);
        s.report_law = ReportLaw(space(2, 2, {"1>2", "2>1"}), {P("0.6")}, {uniform(), uniform()});
        s.outcome_law = outcomes({"0.2 + 0.5*w", "1.0 + 0.5*w + 0.4*r1", "0.7 + 0.5*w + 0.4*r2"});
        s.mechanism.id = "ttc_parametric";
        s.conduct = {"ttc_path", {0.2, 0.2}, "linear"};
        out.push_back(s);
    }

    // Targeting: W | X ~ Bernoulli(p(X)).
    {
        auto s = base("target_price", "targeting", "price cutoff; reports depend on X only, CATE-Psi(x) = x");
        s.policy_law = PolicyLaw::covariate({}, {}, 0.0, 1.0, P("0.5"));
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"0.4*(x - 0.5)"})});
        s.outcome_law = outcomes({"0.3 + w*x + 0.5*r", "1.1 + w*x + 0.9*r"});
        s.mechanism.id = "price_cutoff";
        s.conduct = {"capacity", {0.3}, "linear"};
        out.push_back(s);
    }
    {
        auto s = base("target_report_shift", "targeting", "price cutoff; W shifts reports by an amount depending on X");
        s.policy_law = PolicyLaw::covariate({}, {}, 0.0, 1.0, P("0.3 + 0.4*x"));
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"0.6*(w - 0.5) + 0.3*(x - 0.5)"})});
        s.outcome_law = outcomes({"0.2 + 0.5*x + 0.6*r + 0.4*w*x", "1.2 + 0.5*x + 1.1*r + 0.4*w*x"});
        s.mechanism.id = "price_cutoff";
        s.conduct = {"capacity", {0.35}, "linear"};
        out.push_back(s);
    }
    {
        auto s = base("target_rationing", "targeting", "rationing with a discrete covariate");
        s.policy_law = PolicyLaw::covariate({0.0, 1.0, 2.0}, {0.3, 0.4, 0.3}, 0.0, 0.0, P("0.4 + 0.1*x"));
        s.report_law = ReportLaw(space(2, 0, {"no_demand", "demand"}), {P("0.6 - 0.2*w - 0.1*x")}, {});
        s.outcome_law = outcomes({"0.2 + 0.3*x + 0.5*w*(x - 1) + 0.2*t", "0.9 + 0.6*x + 0.5*w*(x - 1) + 0.2*t"});
        s.mechanism.id = "random_rationing";
        s.conduct = {"capacity", {0.3}, "linear"};
        out.push_back(s);
    }
    {
        auto s = base("target_auction", "targeting", "fixed-quantity auction with a continuous covariate");
        s.policy_law = PolicyLaw::covariate({}, {}, 0.0, 1.0, P("0.5"));
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"0.8*(w - 0.5)*x"})});
        s.outcome_law = outcomes({"0.3 + 0.6*r + 0.5*w*x", "1.1 + 0.4*x + 0.6*r + 0.5*w*x"});
        s.mechanism = {"second_price_auction", 3};
        s.conduct = {"capacity", {0.2}, "linear"};
        out.push_back(s);
    }
    {
        auto s = base("target_school", "targeting", "two-school deferred acceptance with a binary covariate");
        s.policy_law = PolicyLaw::covariate({0.0, 1.0}, {0.5, 0.5}, 0.0, 0.0, P("0.4 + 0.2*x"));
        s.report_law = ReportLaw(space(6, 2, {"1>2>0", "1>0>2", "2>1>0", "2>0>1", "0>1>2", "0>2>1"}),
                                 {P("0.25 + 0.05*w"), P("0.1"), P("0.3 - 0.05*w"), P("0.1"), P("0.15")},
                                 {legendre({"0.4*(w - 0.5) + 0.2*x"}), legendre({"0.2*(x - 0.5)"})});
        s.outcome_law = outcomes({"0.2 + 0.3*x + 0.4*w*x + 0.5*r1", "1.2 + 0.6*x + 0.4*w*x + 0.5*r1",
                                  "0.8 + 0.3*x + 0.6*w + 0.5*r1 + 0.3*r2"});
        s.mechanism.id = "two_school_da";
        s.conduct = {"capacity", {0.25, 0.3}, "linear"};
        out.push_back(s);
    }

    // IV: W = 1{p(Z) > xi}; the effect of W on Psi is 1 + xi.
    {
        auto s = base("iv_mte", "iv", "price cutoff with a binary instrument; reports ignore W, so MTE on Psi is 1 + xi");
        s.policy_law = PolicyLaw::instrument(0.5, 0.2, 0.6);
        s.report_law = ReportLaw(space(1, 1), {}, {legendre({"-0.3"})});
        s.outcome_law = outcomes({"0.5 + w*(1 + xi)", "1.3 + w*(1 + xi)"});
        s.mechanism.id = "price_cutoff";
        s.conduct = {"capacity", {0.3}, "linear"};
        s.scores = {score("z_shift", "binary_shift", {}, "z")};
        out.push_back(s);
    }
    return out;
}

} // namespace

const std::vector<ScenarioSpec>& catalog()
{
    static const std::vector<ScenarioSpec> all = build();
    return all;
}

std::vector<std::string> catalog_ids()
{
    std::vector<std::string> ids;
    for (const auto& s : catalog()) ids.push_back(s.id);
    return ids;
}

std::vector<std::string> catalog_ids_in(const std::string& section)
{
    std::vector<std::string> ids;
    for (const auto& s : catalog())
        if (s.section == section) ids.push_back(s.id);
    return ids;
}

ScenarioSpec catalog_scenario(const std::string& id)
{
    for (const auto& s : catalog())
        if (s.id == id) return s;
    throw ConfigError("unknown scenario '" + id + "'");
}

} // namespace mpelab::lab

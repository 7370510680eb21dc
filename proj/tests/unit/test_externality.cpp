#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "mpelab/externality/gamma.hpp"
#include "mpelab/externality/local_tau.hpp"
#include "mpelab/externality/psi.hpp"
#include "mpelab/externality/welfare_gradient.hpp"
#include "mpelab/mechanism/assign.hpp"
#include "mpelab/population/sampling.hpp"
#include "support.hpp"

using namespace mpelab;
using namespace mpelab::externality;

namespace {

std::string market(const std::string& coord, const std::string& mech, int n, double q, const std::string& m0,
                   const std::string& m1, const std::string& noise = R"({"family": "none"})")
{
    return R"({"id": "m", "policy_law": {"family": "bernoulli", "p": 0.5},
      "report_law": {"coordinates": [)" + coord + R"(]},
      "outcome_law": {"means": [")" + m0 + R"(", ")" + m1 + R"("], "noise": )" + noise + R"(},
      "mechanism": {"id": ")" + mech + R"(", "params": {"participants": )" + std::to_string(n) + R"(}},
      "conduct_rule": {"id": "capacity", "q": [)" + std::to_string(q) + "]}}";
}

const std::string kUniform = R"({"family": "uniform"})";
// Same F(0.7) = 0.7 as the uniform law but f(0.7) = 1.105.
const std::string kBent = R"({"family": "legendre", "coef": ["0.1", "-0.25"]})";

Report bid(double x)
{
    Report r;
    r.x[0] = x;
    return r;
}

// rho_{j->k} and tau_{j->k} of a two-school model, keyed by (school j, destination k).
struct Flows {
    std::map<std::pair<int, int>, double> rho_, tau_;
    double rho(int j, int k) const { return rho_.count({j, k}) ? rho_.at({j, k}) : 0.0; }
    double tau(int j, int k) const { return tau_.count({j, k}) ? tau_.at({j, k}) : 0.0; }
};

Flows flows(const welfare::AnalyticModel& m)
{
    Flows f;
    for (const auto& mg : m.gradient.margins) {
        f.rho_[{mg.a_plus, mg.a_minus}] += mg.density;
        f.tau_[{mg.a_plus, mg.a_minus}] = mg.tau;
    }
    return f;
}

} // namespace

TEST(Gamma, SecondBidderClosedForm)
{
    // n = 2, F uniform, (1 - c^2)/2 = 0.375 puts c0 at 0.5, tau = 1.
    auto fx = test::build(test::from_json(market(kUniform, "second_price_auction", 2, 0.375, "0", "1")));
    ASSERT_NEAR(fx.m().state.c[0], 0.5, 1e-10);
    EXPECT_NEAR(fx.m().gamma.at(0.6), 0.4, 1e-10);
    EXPECT_NEAR(fx.m().gamma.at(1.0), 0.0, 1e-12);
    // Below the reserve only competitors above it can be displaced.
    EXPECT_NEAR(fx.m().gamma.at(0.2), 0.5, 1e-10);
}

TEST(Gamma, VanishesWithoutEffectOrCompetition)
{
    auto flat = test::build(test::from_json(market(kUniform, "second_price_auction", 3, 0.3, "1 + r", "1 + r")));
    for (double r : {0.1, 0.5, 0.9}) EXPECT_NEAR(flat.m().gamma.at(r), 0.0, 1e-12);
    auto price = test::build(test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0", "1")));
    EXPECT_TRUE(price.m().gamma.is_zero());
}

TEST(Gamma, PairEstimatorAgreesWithOrderStatistics)
{
    const auto spec = test::from_json(market(kUniform, "second_price_auction", 3, 0.3, "0.2 + r", "1 + r",
                                             R"({"family": "normal", "sd": 0.5})"));
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 100000, 1);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 2);
    const std::vector<double> probes{0.3, 0.6, 0.8};
    const auto est = gamma_pair_estimator(agents, *fx.m().mech, *fx.m().d, fx.m().state.c, probes);
    for (std::size_t i = 0; i < probes.size(); ++i)
        EXPECT_LE(std::abs(est.gamma[i] - fx.m().gamma.at(probes[i])), 3 * est.se[i]) << probes[i];
}

TEST(Gradient, PriceCutoffUniform)
{
    // c0 = 0.7, tau(c0) = 1.7, f(c0) = 1.
    auto fx = test::build(test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0", "1 + r")));
    EXPECT_NEAR(fx.m().gradient.grad[0], -1.7, 1e-10);
    EXPECT_NEAR(fx.m().gradient.inframarginal[0], 0.0, 1e-12);
    EXPECT_NEAR(local_tau_oracle(fx.m().gradient, 0).tau, 1.7, 1e-10);
}

TEST(Gradient, FlatOutcomeHasNoGradient)
{
    auto fx = test::build(test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0.5", "0.5")));
    EXPECT_NEAR(fx.m().gradient.grad[0], 0.0, 1e-12);
}

TEST(Conduct, DensityCancels)
{
    auto a = test::build(test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0", "1 + r")));
    auto b = test::build(test::from_json(market(kBent, "price_cutoff", 2, 0.3, "0", "1 + r")));
    ASSERT_NEAR(b.m().state.c[0], 0.7, 1e-10);
    ASSERT_GT(std::abs(b.m().d->marginal_pdf(0, 0.7) - 1.0), 0.05);
    for (double r : {0.1, 0.5, 0.69, 0.71, 0.95}) {
        EXPECT_NEAR(a.m().conduct(bid(r)), b.m().conduct(bid(r)), 1e-8) << r;
        EXPECT_NEAR(a.m().conduct(bid(r)), r >= 0.7 ? -1.7 : 0.0, 1e-8) << r;
    }
}

TEST(Conduct, ZeroGradientGivesZero)
{
    auto fx = test::build(test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0.5", "0.5")));
    for (double r : {0.2, 0.8}) EXPECT_NEAR(fx.m().conduct(bid(r)), 0.0, 1e-12);
}

TEST(Conduct, TwoSchoolClosedForm)
{
    for (double shift : {0.0, 0.5}) {
        auto spec = lab::catalog_scenario("two_school");
        spec.outcome_law = spec.outcome_law.shifted(2, shift);
        auto fx = test::build(spec);
        const auto& m = fx.m();
        const auto f = flows(m);
        const double G1 = -(f.rho(1, 0) * f.tau(1, 0) + f.rho(1, 2) * f.tau(1, 2));
        const double G2 = -(f.rho(2, 0) * f.tau(2, 0) + f.rho(2, 1) * f.tau(2, 1));
        EXPECT_NEAR(m.gradient.grad[0], G1, 1e-10);
        EXPECT_NEAR(m.gradient.grad[1], G2, 1e-10);
        // With J = d(shares)/dc = [[-(rho10 + rho12), rho21], [rho12, -(rho20 + rho21)]]:
        const double det = (f.rho(1, 0) + f.rho(1, 2)) * (f.rho(2, 0) + f.rho(2, 1)) - f.rho(1, 2) * f.rho(2, 1);
        const double v1 = -((f.rho(2, 0) + f.rho(2, 1)) * G1 + f.rho(1, 2) * G2) / det;
        const double v2 = -((f.rho(1, 0) + f.rho(1, 2)) * G2 + f.rho(2, 1) * G1) / det;
        Report r;
        EXPECT_NEAR(m.conduct.realized(r, 1), -v1, 1e-6) << shift;
        EXPECT_NEAR(m.conduct.realized(r, 2), -v2, 1e-6) << shift;
        EXPECT_NEAR(m.conduct.realized(r, 0), 0.0, 1e-12);
        EXPECT_NEAR(m.state.jacobian(0, 1), f.rho(2, 1), 1e-6);
        EXPECT_NEAR(m.state.jacobian(1, 0), f.rho(1, 2), 1e-6);
    }
}

TEST(LocalTau, EstimatedWithinStandardErrors)
{
    const auto spec = test::from_json(market(kUniform, "price_cutoff", 2, 0.3, "0", "1 + r",
                                             R"({"family": "normal", "sd": 0.5})"));
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 100000, 3);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 4);
    const auto est = local_tau_estimated(agents, *fx.m().mech, *fx.m().d, fx.m().state.c, fx.m().gradient.margins[0]);
    EXPECT_LE(std::abs(est.tau - 1.7), 3 * est.se);
    EXPECT_GE(est.n_minus, 50u);

    auto few = population::sample_population(spec, 60, 3);
    mechanism::assign(*fx.m().mech, few, fx.m().state.c, *fx.m().d, spec.outcome_law, 4);
    EXPECT_THROW(local_tau_estimated(few, *fx.m().mech, *fx.m().d, fx.m().state.c, fx.m().gradient.margins[0]),
                 EstimationError);
}

TEST(LocalTau, ConstantEffectEverywhere)
{
    auto fx = test::build(lab::catalog_scenario("two_school"));
    auto spec = lab::catalog_scenario("two_school");
    population::OutcomeLaw flat({population::parse_polynomial("0.5 + r1"), population::parse_polynomial("0.8 + r1"),
                                 population::parse_polynomial("0.8 + r1")},
                                population::NoiseLaw::normal(0.5));
    spec.outcome_law = flat;
    auto c = test::build(spec);
    for (std::size_t i = 0; i < c.m().gradient.margins.size(); ++i) {
        const auto& mg = c.m().gradient.margins[i];
        const double expect = mg.a_minus == 0 ? 0.3 : 0.0;
        EXPECT_NEAR(local_tau_oracle(c.m().gradient, i).tau, expect, 1e-10);
    }
}

TEST(Psi, ColumnsAddUp)
{
    const auto& spec = lab::catalog_scenario("auction_fixed_q");
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 2000, 1);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 2);
    const auto psi = build_psi(agents, fx.m().gamma, fx.m().conduct);
    ASSERT_EQ(psi.size(), agents.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        EXPECT_NEAR(psi.psi_fixed[i], psi.y[i] + psi.gamma[i], 1e-12);
        EXPECT_NEAR(psi.psi_total[i], psi.psi_fixed[i] + psi.psi_conduct[i], 1e-12);
    }
}

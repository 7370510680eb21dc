#include <cmath>

#include <gtest/gtest.h>

#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/oracle/oracle.hpp"
#include "support.hpp"

using namespace mpelab;
using namespace mpelab::oracle;

namespace {

// W independent of the demand type; U(theta) is linear in P(W = 1).
const char* kLinearRationing = R"({"id": "lin", "policy_law": {"family": "bernoulli", "p": 0.5},
  "report_law": {"types": ["no", "yes"], "type_probs": ["0.5"]},
  "outcome_law": {"means": ["w", "1 + 2*w"], "noise": {"family": "none"}},
  "mechanism": {"id": "random_rationing"}, "conduct_rule": {"id": "capacity", "q": [0.25]},
  "scores": [{"id": "shift", "kind": "binary_shift"}]})";

// Neither reports nor outcomes depend on W.
const char* kNull = R"({"id": "null", "policy_law": {"family": "bernoulli", "p": 0.4},
  "report_law": {"coordinates": [{"family": "legendre", "coef": ["0.2"]}]},
  "outcome_law": {"means": ["0.3 + r", "1 + r"], "noise": {"family": "normal", "sd": 0.5}},
  "mechanism": {"id": "second_price_auction", "params": {"participants": 3}},
  "conduct_rule": {"id": "capacity", "q": [0.3]},
  "scores": [{"id": "shift", "kind": "binary_shift"}]})";

const char* kMyersonUniform = R"({"id": "my", "policy_law": {"family": "bernoulli", "p": 0.5},
  "report_law": {"coordinates": [{"family": "uniform"}]},
  "outcome_law": {"means": ["0", "1 + r"], "noise": {"family": "none"}},
  "mechanism": {"id": "second_price_auction", "params": {"participants": 2}},
  "conduct_rule": {"id": "myerson"}})";

const char* kPriceUniform = R"({"id": "pu", "policy_law": {"family": "bernoulli", "p": 0.5},
  "report_law": {"coordinates": [{"family": "uniform"}]},
  "outcome_law": {"means": ["0", "1 + r"], "noise": {"family": "none"}},
  "mechanism": {"id": "price_cutoff"}, "conduct_rule": {"id": "capacity", "q": [0.3]}})";

population::ReportScore centred(const mechanism::ReportDistribution& d, const std::string& expr)
{
    population::ReportScoreSpec s;
    s.id = expr;
    s.expr = population::parse_polynomial(expr);
    return mechanism::make_report_score(s, d);
}

} // namespace

TEST(Richardson, QuadraticIsExactAndSmoothHasOrderTwo)
{
    const auto q = richardson([](double t) { return 3 * t + t * t; }, {1e-2, 5e-3, 2.5e-3}, 1.0);
    EXPECT_NEAR(q.value, 3.0, 1e-12);
    EXPECT_TRUE(q.exact);
    const auto s = richardson([](double t) { return std::sin(1 + t); }, {1e-1, 5e-2, 2.5e-2}, 1.0);
    EXPECT_NEAR(s.value, std::cos(1.0), 1e-8);
    EXPECT_NEAR(s.order, 2.0, 0.05);
    EXPECT_TRUE(s.order_ok);
}

TEST(FdMpe, LinearWelfarePath)
{
    // p(theta) = 1/2 + theta, U = p + (1/2)(1/2)(1 + p).
    const auto spec = test::from_json(kLinearRationing);
    population::Population pop(spec, {});
    const auto r = fd_mpe(pop, {}, test::score(spec, "shift"));
    EXPECT_NEAR(r.value, 1.25, 1e-10);
}

TEST(FdMpe, NullScenario)
{
    const auto spec = test::from_json(kNull);
    population::Population pop(spec, {});
    const auto s = test::score(spec, "shift");
    EXPECT_NEAR(fd_mpe(pop, {}, s).value, 0.0, 1e-10);
    for (double th : {-0.1, 0.05, 0.2}) EXPECT_NEAR(welfare_at(pop, {}, s, th), welfare_at(pop, {}, s, 0.0), 1e-12);
}

TEST(WelfareAt, AnchorAndGolden)
{
    const auto& spec = lab::catalog_scenario("price_cutoff");
    numerics::QuadratureConfig q;
    q.nodes_1d = 4096;
    population::Population pop(spec, q);
    const auto s = test::score(spec, "binary_shift");
    auto fx = test::build(spec);
    const auto field = mechanism::PolynomialField(*fx.m().d, spec.outcome_law);
    const double u0 = mechanism::integrate_welfare(*fx.m().d, fx.m().grid, *fx.m().mech, fx.m().state.c, field);
    EXPECT_NEAR(welfare_at(pop, {}, s, 0.0), u0, 1e-12);
    EXPECT_NEAR(welfare_at(pop, {}, s, 0.01), 1.6496239947381679, 1e-12);
}

TEST(FdGradient, PriceCutoffAndFlat)
{
    auto fx = test::build(test::from_json(kPriceUniform));
    EXPECT_NEAR(fd_gradient_c(fx.m()).value[0], -1.7, 1e-6);
    auto spec = test::from_json(kPriceUniform);
    spec.outcome_law = population::OutcomeLaw({population::parse_polynomial("0.5"), population::parse_polynomial("0.5")}, {});
    auto flat = test::build(spec);
    EXPECT_NEAR(fd_gradient_c(flat.m()).value[0], 0.0, 1e-10);
}

TEST(FdGradient, SymmetricTwoSchool)
{
    auto fx = test::build(test::from_json(R"({"id": "s", "policy_law": {"family": "bernoulli", "p": 0.5},
      "report_law": {"types": ["1>2>0", "1>0>2", "2>1>0", "2>0>1", "0>1>2", "0>2>1"],
                     "type_probs": ["0.3", "0.1", "0.3", "0.1", "0.1"],
                     "coordinates": [{"family": "uniform"}, {"family": "uniform"}]},
      "outcome_law": {"means": ["0", "1 + r1", "1 + r2"], "noise": {"family": "none"}},
      "mechanism": {"id": "two_school_da"}, "conduct_rule": {"id": "capacity", "q": [0.2, 0.2]}})"));
    const auto g = fd_gradient_c(fx.m()).value;
    EXPECT_NEAR(g[0], g[1], 1e-8);
    EXPECT_NEAR(fx.m().gradient.grad[0], g[0], 1e-3 * std::abs(g[0]));
}

TEST(FdConduct, ZeroTiltAndQuantileShift)
{
    auto fx = test::build(test::from_json(kPriceUniform));
    population::ReportScore zero;
    EXPECT_NEAR(fd_conduct_derivative(fx.m(), zero).value[0], 0.0, 1e-12);
    // s = 1{R > c0} - (1 - c0): c' = E[s 1{R > c0}] / f(c0) = 0.3 - 0.09.
    const population::ReportScore above(
        "above", [](const Report& r) { return (r.x[0] > 0.7 ? 1.0 : 0.0) - 0.3; }, {}, {0.7});
    // c(theta) has different curvature on either side of zero under this tilt, so the central
    // differences are first-order accurate only; small steps keep that bias below 1e-6.
    OracleConfig tiny;
    tiny.steps = {1e-5, 5e-6, 2.5e-6};
    EXPECT_NEAR(fd_conduct_derivative(fx.m(), above, tiny).value[0], 0.21, 1e-6);
    EXPECT_NEAR(welfare::conduct_derivative(fx.m(), above)[0], 0.21, 1e-8);
}

TEST(FdConduct, MyersonUniformClosedForm)
{
    auto fx = test::build(test::from_json(kMyersonUniform));
    const auto s = centred(*fx.m().d, "r");
    EXPECT_NEAR(fd_conduct_derivative(fx.m(), s).value[0], 1.0 / 16, 1e-6);
    EXPECT_NEAR(welfare::conduct_derivative(fx.m(), s)[0], 1.0 / 16, 1e-6);
}

TEST(FdCompetition, ZeroWithoutCompetitionChannel)
{
    const auto spec = test::from_json(kPriceUniform);
    auto fx = test::build(spec);
    population::ScoreSpec ss;
    ss.id = "shift";
    ss.kind = "binary_shift";
    const auto s = population::make_policy_score(ss, spec.policy_law, 256);
    EXPECT_NEAR(fd_partial_competition(fx.m(), s).value, 0.0, 1e-12);

    auto flat = test::build(test::from_json(kNull));
    auto spec2 = test::from_json(kNull);
    spec2.outcome_law = population::OutcomeLaw({population::parse_polynomial("1 + r"), population::parse_polynomial("1 + r")}, {});
    auto notau = test::build(spec2);
    EXPECT_NEAR(fd_partial_competition(notau.m(), test::score(spec2, "shift")).value, 0.0, 1e-12);
}

TEST(FdCompetition, AuctionMatchesGammaTerm)
{
    auto fx = test::build("auction_fixed_q");
    const auto& spec = lab::catalog_scenario("auction_fixed_q");
    for (const auto& ss : spec.scores) {
        const auto s = population::make_policy_score(ss, spec.policy_law, 256);
        const double an = welfare::mpe_covariance(fx.m(), s).competition;
        EXPECT_LE(test::rel_err(an, fd_partial_competition(fx.m(), s).value), 1e-3) << ss.id;
    }
}

TEST(FdMpe, MonteCarloCoupledEstimate)
{
    const auto& spec = lab::catalog_scenario("price_cutoff");
    population::Population pop(spec, {});
    OracleConfig cfg;
    cfg.mode = "mc";
    cfg.mc_samples = 100000;
    const auto s = test::score(spec, "linear");
    const auto mc = fd_mpe(pop, {}, s, cfg);
    const auto qd = fd_mpe(pop, {}, s);
    EXPECT_GT(mc.se, 0.0);
    EXPECT_LE(std::abs(mc.value - qd.value), 3 * mc.se);
    EXPECT_EQ(fd_mpe(pop, {}, s, cfg).value, mc.value);
}

#include <cmath>

#include <gtest/gtest.h>

#include "mpelab/errors.hpp"
#include "mpelab/externality/psi.hpp"
#include "mpelab/mechanism/assign.hpp"
#include "mpelab/population/sampling.hpp"
#include "mpelab/welfare/functionals.hpp"
#include "mpelab/welfare/iv.hpp"
#include "mpelab/welfare/targeting.hpp"
#include "support.hpp"

using namespace mpelab;
using namespace mpelab::welfare;

namespace {

std::string price(const std::string& policy, const std::string& coef, const std::string& m0, const std::string& m1,
                  const std::string& scores = "[]", double q = 0.3)
{
    return R"({"id": "p", "policy_law": )" + policy + R"(,
      "report_law": {"coordinates": [{"family": "legendre", "coef": [")" + coef + R"("]}]},
      "outcome_law": {"means": [")" + m0 + R"(", ")" + m1 + R"("], "noise": {"family": "normal", "sd": 0.5}},
      "mechanism": {"id": "price_cutoff"}, "conduct_rule": {"id": "capacity", "q": [)" + std::to_string(q) + R"(]},
      "scores": )" + scores + "}";
}

const std::string kBern = R"({"family": "bernoulli", "p": 0.5})";
const std::string kShift = R"([{"id": "shift", "kind": "binary_shift"}])";
const std::string kCov = R"({"family": "covariate", "x_lo": 0, "x_hi": 1, "propensity": "0.4 + 0.2*x"})";

} // namespace

TEST(Mpe, IndependentScoreGivesZero)
{
    const auto spec = test::from_json(price(kBern, "0.2", "0.3 + r", "1 + r", kShift));
    auto fx = test::build(spec);
    EXPECT_NEAR(mpe_covariance(fx.m(), test::score(spec, "shift")).total(), 0.0, 1e-12);
}

TEST(Mpe, ConstantOutcomeGivesZero)
{
    const auto spec = test::from_json(price(kBern, "0.3*w", "2", "2", kShift));
    auto fx = test::build(spec);
    const auto r = mpe_covariance(fx.m(), test::score(spec, "shift"));
    EXPECT_NEAR(r.total(), 0.0, 1e-12);
    EXPECT_NEAR(r.competition, 0.0, 1e-15);
}

TEST(Mpe, GeneralEqualsCovarianceForL2)
{
    for (const char* id : {"rationing", "auction_fixed_q", "two_school"}) {
        const auto& spec = lab::catalog_scenario(id);
        auto fx = test::build(spec);
        for (const auto& ss : spec.scores) {
            const auto s = population::make_policy_score(ss, spec.policy_law, 256);
            EXPECT_NEAR(mpe_general(fx.m(), s).total(), mpe_covariance(fx.m(), s).total(), 1e-9) << id << " " << ss.id;
        }
    }
}

TEST(Mpe, SobolevConductNeedsGeneralPairing)
{
    const auto& spec = lab::catalog_scenario("auction_myerson");
    auto fx = test::build(spec);
    const auto s = test::score(spec, "linear");
    EXPECT_THROW(mpe_covariance(fx.m(), s), ConfigError);
    EXPECT_EQ(mpe_general(fx.m(), s).pairing, "H1");
}

TEST(Mpe, MyersonWithPolicyInvariantReports)
{
    auto spec = lab::catalog_scenario("auction_myerson");
    spec.report_law = population::ReportLaw(spec.report_law.space(), {}, {population::CoordinateSpec{}});
    auto fx = test::build(spec);
    const auto r = mpe_general(fx.m(), test::score(spec, "linear"));
    EXPECT_NEAR(r.conduct, 0.0, 1e-12);
    EXPECT_NEAR(r.competition, 0.0, 1e-12);
}

TEST(Mpe, SampleEstimateWithinStandardErrors)
{
    const auto& spec = lab::catalog_scenario("price_cutoff");
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 100000, 11);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 12);
    const auto psi = externality::build_psi(agents, fx.m().gamma, fx.m().conduct);
    for (const auto& ss : spec.scores) {
        const auto s = population::make_policy_score(ss, spec.policy_law, 256);
        const auto est = mpe_sample(psi, agents, s);
        EXPECT_LE(std::abs(est.total() - mpe_covariance(fx.m(), s).total()), 3.5 * est.se) << ss.id;
    }
}

TEST(Functionals, Parse)
{
    EXPECT_EQ(parse_functional("mean").kind, "mean");
    EXPECT_EQ(parse_functional("quantile").tau_q, 0.5);
    EXPECT_EQ(parse_functional("quantile:0.25").tau_q, 0.25);
    EXPECT_EQ(parse_functional("quantile:0.25").id(), "quantile:0.25");
    EXPECT_THROW(parse_functional("quantile:1.5"), ConfigError);
    EXPECT_THROW(parse_functional("variance"), ConfigError);
}

TEST(Functionals, InfluenceFunctionsHaveMeanZero)
{
    const auto& spec = lab::catalog_scenario("price_cutoff");
    for (const char* f : {"mean", "quantile", "quantile:0.8", "gini"}) {
        auto fx = test::build(spec, parse_functional(f));
        EXPECT_NEAR(fx.m().functional->mean_influence(), 0.0, 1e-6) << f;
    }
    auto fx = test::build(spec);
    const auto& mean = *fx.m().functional;
    for (double dy : {-1.0, 0.0, 1.0}) EXPECT_NEAR(mean.influence(mean.value() + dy), dy, 1e-12);
}

TEST(Functionals, GiniInfluenceMatchesDirectCalculation)
{
    const auto& spec = lab::catalog_scenario("price_cutoff");
    auto fx = test::build(spec, parse_functional("gini"));
    const auto& g = *fx.m().functional;
    // E[IF(m + e)] by Gauss-Hermite-free quadrature over the noise.
    for (double m : {0.5, 1.5, 2.5}) {
        const double sd = 0.5;
        const double v = numerics::gauss_legendre_panels(
            [&](double e) { return g.influence(m + e) * std::exp(-0.5 * e * e / (sd * sd)) / (sd * std::sqrt(2 * M_PI)); },
            -10 * sd, 10 * sd, 40);
        EXPECT_NEAR(g.conditional_influence(m), v, 1e-6) << m;
    }
}

TEST(Functionals, QuantileInGapIsIllPosed)
{
    const auto spec = test::from_json(R"({"id": "gap", "policy_law": {"family": "bernoulli", "p": 0.5},
      "report_law": {"coordinates": [{"family": "uniform"}]},
      "outcome_law": {"means": ["0", "10"], "noise": {"family": "normal", "sd": 0.05}},
      "mechanism": {"id": "price_cutoff"}, "conduct_rule": {"id": "capacity", "q": [0.5]}})");
    EXPECT_THROW(test::build(spec, parse_functional("quantile")), DomainError);
}

TEST(Functionals, MeanMatchesWelfareIntegral)
{
    const auto& spec = lab::catalog_scenario("two_school");
    auto fx = test::build(spec);
    const auto& m = fx.m();
    EXPECT_NEAR(functional_value({}, *m.mech, *m.d, m.state.c, spec.outcome_law), m.functional->value(), 1e-12);
}

TEST(Targeting, ConstantCateGivesConstantDirection)
{
    // Reports ignore W, so Psi moves with W only through the 0.5 outcome shift.
    auto fx = test::build(test::from_json(price(kCov, "0.3*(x - 0.5)", "0.3 + 0.5*w + r", "1 + 0.5*w + r")));
    const auto t = optimal_targeting(fx.m(), 2.0, 10);
    for (double c : t.cate.cate) EXPECT_NEAR(c, 0.5, 1e-10);
    for (double h : t.optimal.h) EXPECT_NEAR(h, std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(t.mpe_optimal, std::sqrt(2.0) * 0.5, 1e-8);
    EXPECT_NEAR(t.mpe_ewm, t.mpe_optimal, 1e-8);
}

TEST(Targeting, ZeroCateIsUndefined)
{
    auto fx = test::build(test::from_json(price(kCov, "0.3*(x - 0.5)", "0.3 + x + r", "1 + x + r")));
    const auto cate = cate_psi_oracle(fx.m());
    EXPECT_LT(cate.norm(), 1e-12);
    EXPECT_THROW(optimal_targeting(fx.m(), 1.0, 0), DomainError);
}

TEST(Targeting, RandomDirectionsHaveTheCappedNorm)
{
    const auto law = population::PolicyLaw::covariate({}, {}, 0.0, 1.0, population::parse_polynomial("0.5"));
    std::vector<double> x, mass;
    for (const auto& a : law.atoms(256)) {
        if (a.point.w != 1.0) continue;
        x.push_back(a.point.x);
        mass.push_back(a.weight / 0.5);
    }
    for (const auto& h : random_directions(law, x, mass, 3.0, 20, 4)) {
        double n2 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) n2 += mass[i] * h(x[i]) * h(x[i]);
        EXPECT_NEAR(n2, 3.0, 1e-8);
    }
}

TEST(Targeting, EstimatedCateRecoversDesign)
{
    const auto& spec = lab::catalog_scenario("target_price");
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 100000, 21);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 22);
    const auto psi = externality::build_psi(agents, fx.m().gamma, fx.m().conduct);
    const auto est = cate_psi_estimated(psi.psi_total, agents, spec.policy_law, 10);
    ASSERT_EQ(est.x.size(), 10u);
    // Bin averages of x, the designed CATE, against the per-bin estimates.
    int outside = 0;
    for (std::size_t b = 0; b < est.x.size(); ++b)
        if (std::abs(est.cate[b] - est.x[b]) > 3 * est.se[b]) ++outside;
    EXPECT_EQ(outside, 0);
}

TEST(Iv, HomogeneousEffect)
{
    auto fx = test::build(test::from_json(price(R"({"family": "instrument", "z_prob": 0.5, "p0": 0.2, "p1": 0.6})",
                                                "-0.3", "0.5 + 0.7*w", "1.3 + 0.7*w")));
    EXPECT_NEAR(wald_psi_oracle(fx.m()), 0.7, 1e-10);
    for (double xi : {0.1, 0.5, 0.9}) EXPECT_NEAR(mte_psi(fx.m(), xi), 0.7, 1e-10);
}

TEST(Iv, DesignedMteLine)
{
    auto fx = test::build("iv_mte");
    for (double xi : {0.0, 0.3, 0.75}) EXPECT_NEAR(mte_psi(fx.m(), xi), 1 + xi, 1e-10);
    const auto ca = complier_average(fx.m());
    EXPECT_NEAR(ca.value, 1.4, 1e-12);
    EXPECT_NEAR(wald_psi_oracle(fx.m()), 1.4, 1e-10);
}

TEST(Iv, IrrelevantInstrument)
{
    const auto spec = test::from_json(price(R"({"family": "instrument", "z_prob": 0.5, "p0": 0.4, "p1": 0.4})",
                                            "-0.3", "0.5 + w*(1 + xi)", "1.3 + w*(1 + xi)",
                                            R"([{"id": "z", "kind": "binary_shift", "variable": "z"}])"));
    auto fx = test::build(spec);
    auto agents = population::sample_population(spec, 20000, 1);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 2);
    const auto psi = externality::build_psi(agents, fx.m().gamma, fx.m().conduct);
    EXPECT_THROW(wald_psi(psi.psi_total, agents), EstimationError);
    EXPECT_NEAR(mpe_covariance(fx.m(), test::score(spec, "z")).total(), 0.0, 1e-12);
}

TEST(Iv, IttIsScaledWaldNumerator)
{
    const auto& spec = lab::catalog_scenario("iv_mte");
    auto fx = test::build(spec);
    const auto s = test::score(spec, "z_shift");
    // E[Psi s_Z] = Cov(Psi, Z) / (pi (1 - pi)) and Cov(W, Z) = pi (1 - pi) (p1 - p0).
    EXPECT_NEAR(mpe_covariance(fx.m(), s).total(), wald_psi_oracle(fx.m()) * 0.4, 1e-10);

    auto agents = population::sample_population(spec, 20000, 5);
    mechanism::assign(*fx.m().mech, agents, fx.m().state.c, *fx.m().d, spec.outcome_law, 6);
    const auto psi = externality::build_psi(agents, fx.m().gamma, fx.m().conduct);
    const auto w = wald_psi(psi.psi_total, agents);
    const auto itt = itt_psi(psi.psi_total, agents, s);
    // Centred Psi makes the sample identity exact: mean((Psi - mean) s_Z) = Cov(Psi, Z) / (pi (1 - pi)).
    EXPECT_NEAR(itt.estimate, w.estimate * w.first_stage / 0.25, 1e-10);
}

#include <cmath>

#include <gtest/gtest.h>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/errors.hpp"
#include "mpelab/mechanism/assign.hpp"
#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/population/sampling.hpp"
#include "support.hpp"

using namespace mpelab;
using namespace mpelab::mechanism;

namespace {

std::string uniform_bids(const std::string& mech, int n)
{
    return R"({"id": "u", "policy_law": {"family": "bernoulli", "p": 0.5},
      "report_law": {"continuous": 1, "coordinates": [{"family": "uniform"}]},
      "outcome_law": {"means": ["0.2 + r", "1 + r"], "noise": {"family": "none"}},
      "mechanism": {"id": ")" + mech + R"(", "params": {"participants": )" + std::to_string(n) + R"(}},
      "conduct_rule": {"id": "capacity", "q": [0.3]}})";
}

const char* kAllDemand = R"({"id": "d", "policy_law": {"family": "bernoulli", "p": 0.5},
  "report_law": {"types": ["no", "yes"], "type_probs": ["0"]},
  "outcome_law": {"means": ["0", "1"], "noise": {"family": "none"}},
  "mechanism": {"id": "random_rationing"}, "conduct_rule": {"id": "capacity", "q": [0.5]}})";

Report bid(double x)
{
    Report r;
    r.x[0] = x;
    return r;
}

Vec scalar(double v) { return Vec::Constant(1, v); }

struct Market {
    population::ScenarioSpec spec;
    population::Population pop;
    ReportDistribution d;
    MechanismPtr mech;
    explicit Market(const std::string& json)
        : spec(test::from_json(json)), pop(spec, {}), d(pop), mech(make_mechanism(spec.mechanism)) {}
};

} // namespace

TEST(Allocation, RationingLottery)
{
    Market s(kAllDemand);
    Report r;
    r.type = 1;
    const auto mu = s.mech->allocation(r, scalar(0.4), s.d);
    EXPECT_DOUBLE_EQ(mu[1], 0.4);
    EXPECT_DOUBLE_EQ(mu[0], 0.6);
    r.type = 0;
    EXPECT_DOUBLE_EQ(s.mech->allocation(r, scalar(0.4), s.d)[1], 0.0);
}

TEST(Allocation, PriceCutoffIsDeterministic)
{
    Market s(uniform_bids("price_cutoff", 2));
    EXPECT_DOUBLE_EQ(s.mech->allocation(bid(0.8), scalar(0.5), s.d)[1], 1.0);
    EXPECT_DOUBLE_EQ(s.mech->allocation(bid(0.3), scalar(0.5), s.d)[1], 0.0);
}

TEST(Allocation, AuctionWinProbability)
{
    Market s(uniform_bids("second_price_auction", 2));
    EXPECT_NEAR(s.mech->allocation(bid(0.8), scalar(0.5), s.d)[1], 0.8, 1e-12);
    EXPECT_DOUBLE_EQ(s.mech->allocation(bid(0.4), scalar(0.5), s.d)[1], 0.0);
    Market s3(uniform_bids("second_price_auction", 3));
    EXPECT_NEAR(s3.mech->allocation(bid(0.8), scalar(0.5), s3.d)[1], 0.64, 1e-12);
}

TEST(Allocation, AuctionCompetitorKernel)
{
    Market s(uniform_bids("second_price_auction", 2));
    const Vec c = scalar(0.5);
    EXPECT_DOUBLE_EQ(s.mech->kernel_L(1, bid(0.4), bid(0.1), c, s.d), 0.0);
    EXPECT_DOUBLE_EQ(s.mech->kernel_L(1, bid(0.7), bid(0.8), c, s.d), 0.0);
    EXPECT_NEAR(s.mech->kernel_L(1, bid(0.9), bid(0.3), c, s.d), 1.0, 1e-12);
    EXPECT_NEAR(s.mech->kernel_L(0, bid(0.9), bid(0.3), c, s.d), -1.0, 1e-12);
}

TEST(Allocation, TwoSchoolFollowsPreferences)
{
    const auto& spec = lab::catalog_scenario("two_school");
    population::Population pop(spec, {});
    ReportDistribution d(pop);
    const auto mech = make_mechanism(spec.mechanism);
    Vec c(2);
    c << 0.6, 0.7;
    Report r;
    r.type = 0;  // 1 > 2 > 0
    r.x = {0.65, 0.75};
    EXPECT_DOUBLE_EQ(mech->allocation(r, c, d)[1], 1.0);
    r.x = {0.5, 0.75};
    EXPECT_DOUBLE_EQ(mech->allocation(r, c, d)[2], 1.0);
    r.type = 1;  // 1 > 0 > 2
    EXPECT_DOUBLE_EQ(mech->allocation(r, c, d)[0], 1.0);
}

TEST(Allocation, OutOfRangeClearingRejected)
{
    Market s(uniform_bids("price_cutoff", 2));
    EXPECT_THROW(s.mech->check_clearing(scalar(1.5), s.pop.space()), DomainError);
    EXPECT_THROW(make_mechanism({"lottery_deluxe", 2}), ConfigError);
}

TEST(Assign, DeterministicEligibility)
{
    Market s(uniform_bids("price_cutoff", 2));
    auto agents = population::sample_population(s.spec, 1000, 5);
    assign(*s.mech, agents, scalar(0.0), s.d, s.spec.outcome_law, 9);
    for (int a : agents.a) EXPECT_EQ(a, 1);
}

TEST(Assign, RationingShares)
{
    Market s(kAllDemand);
    auto agents = population::sample_population(s.spec, 1000, 5);
    assign(*s.mech, agents, scalar(0.0), s.d, s.spec.outcome_law, 9);
    for (int a : agents.a) EXPECT_EQ(a, 0);

    const std::size_t n = 1000000;
    auto many = population::sample_population(s.spec, n, 5);
    assign(*s.mech, many, scalar(0.5), s.d, s.spec.outcome_law, 9);
    double share = 0;
    for (int a : many.a) share += a;
    EXPECT_NEAR(share / n, 0.5, 3 * 0.5 / std::sqrt(double(n)) * 2);
}

TEST(Assign, IndependentOfWorkerCount)
{
    Market s(uniform_bids("second_price_auction", 3));
    auto a = population::sample_population(s.spec, 5000, 2), b = a;
    setenv("MPE_LAB_THREADS", "1", 1);
    assign(*s.mech, a, scalar(0.5), s.d, s.spec.outcome_law, 4);
    setenv("MPE_LAB_THREADS", "3", 1);
    assign(*s.mech, b, scalar(0.5), s.d, s.spec.outcome_law, 4);
    unsetenv("MPE_LAB_THREADS");
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.y, b.y);
}

TEST(Integrate, ShareJacobianMatchesDifferences)
{
    for (const char* id : {"price_cutoff", "auction_fixed_q", "rationing", "two_school"}) {
        const auto& spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        ReportDistribution d(pop);
        const auto mech = make_mechanism(spec.mechanism);
        const auto st = clearing::solve_equilibrium(*mech, d, spec.conduct);
        const auto g = make_grid(d, mech.get(), &st.c);
        const Mat an = share_jacobian(d, g, *mech, st.c);
        const Mat fd = clearing::clearing_jacobian_fd(*mech, d, st.c);
        EXPECT_LT((an - fd).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, fd.cwiseAbs().maxCoeff())) << id;
    }
}

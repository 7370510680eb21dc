// Randomised invariants. Generators are seeded, so every failure reproduces.
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/clearing/influence.hpp"
#include "mpelab/externality/local_tau.hpp"
#include "mpelab/mechanism/assign.hpp"
#include "mpelab/mechanism/integrate.hpp"
#include "mpelab/oracle/oracle.hpp"
#include "mpelab/population/sampling.hpp"
#include "support.hpp"

using namespace mpelab;
using mechanism::Vec;

namespace {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    // Legendre coefficients a1 + 0.2 w and a2 with |a1| + 0.2 + |a2| <= 0.9, so the density stays above 0.1.
    std::string legendre()
    {
        const double a1 = uniform(-0.4, 0.4);
        const double a2 = uniform(-1, 1) * (0.7 - std::abs(a1));
        std::ostringstream os;
        os.precision(17);
        os << R"({"family": "legendre", "coef": [")" << a1 << R"( + 0.2*w", ")" << a2 << R"("]})";
        return os.str();
    }

    // A cubic in r with coefficients in [-1, 1].
    std::string cubic(const std::string& var = "r")
    {
        std::ostringstream os;
        os.precision(17);
        os << uniform(-1, 1) << "*" << var << " + " << uniform(-1, 1) << "*" << var << "^2 + " << uniform(-1, 1) << "*"
           << var << "^3";
        return os.str();
    }

    // Smooth bounded test function of a report.
    std::function<double(const Report&)> test_function()
    {
        const double a = uniform(-4, 4), b = uniform(0, 6.3), c = uniform(-1, 1), t = uniform(-1, 1);
        const double e = uniform(-3, 3);
        return [=](const Report& r) { return std::sin(a * r.x[0] + b) + c * std::cos(e * r.x[1]) + t * r.type; };
    }

private:
    std::mt19937_64 eng_;
};

std::string one_bid_market(const std::string& coord, const std::string& mech, const std::string& conduct, double q,
                           const std::string& m0 = "0.2 + r", const std::string& m1 = "1 + r*r",
                           const std::string& noise = R"({"family": "none"})")
{
    std::ostringstream os;
    os.precision(17);
    os << R"({"id": "gen", "policy_law": {"family": "bernoulli", "p": 0.5},
      "report_law": {"coordinates": [)" << coord << R"(]},
      "outcome_law": {"means": [")" << m0 << R"(", ")" << m1 << R"("], "noise": )" << noise << R"(},
      "mechanism": {"id": ")" << mech << R"(", "params": {"participants": 3}},
      "conduct_rule": {"id": ")" << conduct << '"';
    if (q > 0) os << R"(, "q": [)" << q << "]";
    os << R"(},
      "scores": [{"id": "binary_shift", "kind": "binary_shift"}]})";
    return os.str();
}

population::ReportScore report_poly(const mechanism::ReportDistribution& d, const std::string& expr)
{
    population::ReportScoreSpec s;
    s.id = expr;
    s.expr = population::parse_polynomial(expr);
    return mechanism::make_report_score(s, d);
}

std::vector<std::string> catalog_with_scores()
{
    std::vector<std::string> out;
    for (const auto& id : lab::catalog_ids())
        if (!lab::catalog_scenario(id).scores.empty()) out.push_back(id);
    return out;
}

double rel_or_abs(double a, double b, double floor = 1e-3)
{
    return std::abs(b) < floor ? std::abs(a - b) : test::rel_err(a, b);
}

} // namespace

TEST(ScoreProperty, CentredInEveryCatalogScenario)
{
    for (const auto& id : catalog_with_scores()) {
        const auto spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        mechanism::ReportDistribution d(pop);
        const auto grid = mechanism::make_grid(d, nullptr, nullptr);
        const auto ones = d.component_mass(std::vector<double>(pop.atoms().size(), 1.0));
        for (const auto& ss : spec.scores) {
            const auto s = population::make_policy_score(ss, spec.policy_law, 256);
            EXPECT_LE(std::abs(population::score_mean(s, pop.atoms())), 1e-8) << id << "/" << ss.id;
            const auto sr = mechanism::induced_report_score(d, s);
            EXPECT_LE(std::abs(mechanism::report_moment(d, grid, [&](const Report& r) { return sr(r); }, ones)), 1e-6)
                << id << "/" << ss.id;
        }
    }
}

TEST(ScoreProperty, PerturbedLawKeepsUnitMass)
{
    Gen g(11);
    for (const auto& id : catalog_with_scores()) {
        const auto spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        for (const auto& ss : spec.scores) {
            const auto s = population::make_policy_score(ss, spec.policy_law, 256);
            const double bound = 1.0 / population::score_sup_abs(s, pop.atoms());
            for (int i = 0; i < 20; ++i) {
                const double theta = g.uniform(-0.95, 0.95) * bound;
                double mass = 0;
                for (const auto& a : population::perturbed_policy_atoms(pop.atoms(), s, theta)) mass += a.weight;
                EXPECT_NEAR(mass, 1.0, 1e-12) << id << "/" << ss.id << " theta=" << theta;
            }
        }
    }
}

TEST(ScoreProperty, InducedScoreTower)
{
    Gen g(12);
    for (const auto& id : catalog_with_scores()) {
        const auto spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        mechanism::ReportDistribution d(pop);
        const auto grid = mechanism::make_grid(d, nullptr, nullptr);
        const auto ones = d.component_mass(std::vector<double>(pop.atoms().size(), 1.0));
        for (const auto& ss : spec.scores) {
            const auto s = population::make_policy_score(ss, spec.policy_law, 256);
            const auto sr = mechanism::induced_report_score(d, s);
            std::vector<double> sw;
            for (const auto& a : pop.atoms()) sw.push_back(s(a.point));
            const auto mass_sw = d.component_mass(sw);
            for (int i = 0; i < 10; ++i) {
                const auto fn = g.test_function();
                const double lhs = mechanism::report_moment(d, grid, [&](const Report& r) { return sr(r) * fn(r); }, ones);
                const double rhs = mechanism::report_moment(d, grid, fn, mass_sw);
                EXPECT_NEAR(lhs, rhs, 1e-6) << id << "/" << ss.id;
            }
        }
    }
}

TEST(MechanismProperty, AllocationsOnTheSimplex)
{
    Gen g(21);
    for (const auto& id : lab::catalog_ids()) {
        auto fx = test::build(id);
        const auto& m = fx.m();
        const auto& space = m.d->space();
        for (int i = 0; i < 1000; ++i) {
            Report r;
            r.type = g.integer(0, space.n_types - 1);
            for (int k = 0; k < space.n_cont; ++k) r.x[k] = g.uniform(space.lo[k], space.hi[k]);
            const auto mu = m.mech->allocation(r, m.state.c, *m.d);
            double sum = 0;
            for (int a = 0; a < m.mech->allocations(); ++a) {
                EXPECT_GE(mu[a], -1e-15) << id;
                sum += mu[a];
            }
            ASSERT_NEAR(sum, 1.0, 1e-12) << id;
        }
    }
}

TEST(MechanismProperty, ClearingGradientsMatchDifferences)
{
    Gen g(22);
    for (const auto& id : lab::catalog_ids()) {
        auto fx = test::build(id);
        const auto& m = fx.m();
        const auto& space = m.d->space();
        const Vec lo = m.mech->lower_bound(space), hi = m.mech->upper_bound(space);
        const int dim = m.mech->clearing_dim();
        for (int i = 0; i < 100; ++i) {
            Report r;
            r.type = g.integer(0, space.n_types - 1);
            for (int k = 0; k < space.n_cont; ++k) r.x[k] = g.uniform(space.lo[k], space.hi[k]);
            Vec c(dim);
            for (int l = 0; l < dim; ++l) c[l] = lo[l] + (hi[l] - lo[l]) * g.uniform(0.1, 0.9);
            // phi_a and h_a are defined for a >= 1; the outside option takes the residual.
            for (int a = 1; a < m.mech->allocations(); ++a) {
                const Vec gs = m.mech->grad_c_smooth(a, r, c, *m.d);
                const Vec ge = m.mech->grad_c_eligibility(a, r, c);
                for (int l = 0; l < dim; ++l) {
                    const double h = 1e-6 * std::max(1.0, std::abs(c[l]));
                    Vec up = c, dn = c;
                    up[l] += h;
                    dn[l] -= h;
                    const double fs = (m.mech->smooth_part(a, r, up, *m.d) - m.mech->smooth_part(a, r, dn, *m.d)) / (2 * h);
                    const double fe = (m.mech->eligibility(a, r, up) - m.mech->eligibility(a, r, dn)) / (2 * h);
                    EXPECT_LE(std::abs(gs[l] - fs), 1e-6 * std::max(1.0, std::abs(fs))) << id << " a=" << a;
                    EXPECT_LE(std::abs(ge[l] - fe), 1e-6 * std::max(1.0, std::abs(fe))) << id << " a=" << a;
                }
            }
        }
    }
}

TEST(MechanismProperty, OwnShareFallsWithOwnCutoff)
{
    for (const std::string id : {"price_cutoff", "two_school"}) {
        auto fx = test::build(id);
        const auto& m = fx.m();
        const Vec lo = m.mech->lower_bound(m.d->space()), hi = m.mech->upper_bound(m.d->space());
        for (int l = 0; l < m.mech->clearing_dim(); ++l) {
            double prev = 2.0;
            for (int i = 0; i <= 40; ++i) {
                Vec c = m.state.c;
                c[l] = lo[l] + (hi[l] - lo[l]) * i / 40.0;
                const auto share = mechanism::aggregate_shares(*m.d, mechanism::make_grid(*m.d, m.mech.get(), &c), *m.mech, c);
                EXPECT_LE(share[l], prev + 1e-12) << id << " l=" << l << " i=" << i;
                prev = share[l];
            }
        }
    }
}

TEST(MechanismProperty, IneligibleBiddersHaveNoCompetitorKernel)
{
    auto fx = test::build("auction_fixed_q");
    const auto& m = fx.m();
    const double c0 = m.state.c[0];
    for (int i = 0; i < 200; ++i) {
        Report r, rp;
        r.x[0] = c0 * i / 200.0;
        for (int j = 0; j <= 50; ++j) {
            rp.x[0] = j / 50.0;
            EXPECT_EQ(m.mech->kernel_L(1, r, rp, m.state.c, *m.d), 0.0);
            EXPECT_EQ(m.mech->kernel_L(0, r, rp, m.state.c, *m.d), 0.0);
        }
    }
}

TEST(ClearingProperty, RandomMarketsClearAndObeyTheImplicitDerivative)
{
    Gen g(31);
    oracle::OracleConfig cfg;
    for (int draw = 0; draw < 12; ++draw) {
        const std::string mech = draw % 2 ? "price_cutoff" : "second_price_auction";
        // Three bidders win at most a third of the time.
        const double q = draw % 2 ? g.uniform(0.1, 0.6) : g.uniform(0.05, 0.3);
        const auto spec = test::from_json(one_bid_market(g.legendre(), mech, "capacity", q));
        auto fx = test::build(spec);
        const auto& m = fx.m();
        EXPECT_LE(m.state.residual, 1e-10) << mech;
        const auto psi = clearing::influence_function_L2(m.state, *m.mech, *m.d);
        for (int k = 0; k < 2; ++k) {
            const auto s = report_poly(*m.d, g.cubic());
            const double analytic = psi.pairing(*m.d, s)[0];
            const double fd = oracle::fd_conduct_derivative(m, s, cfg).value[0];
            EXPECT_LE(rel_or_abs(analytic, fd), 1e-3) << mech << " " << s.id() << ": " << analytic << " vs " << fd;
        }
    }
}

TEST(ClearingProperty, RandomReserveSobolevRepresenter)
{
    Gen g(32);
    for (int draw = 0; draw < 6; ++draw) {
        auto fx = test::build(test::from_json(one_bid_market(g.legendre(), "second_price_auction", "myerson", 0)));
        const auto& m = fx.m();
        EXPECT_LE(m.state.residual, 1e-10);
        const auto psi = clearing::sturm_liouville_representer(*m.d, m.state.c[0], 2048);
        for (int k = 0; k < 3; ++k) {
            const auto s = report_poly(*m.d, g.cubic());
            const double ift = clearing::myerson_ift_functional(*m.d, m.state.c[0], s);
            EXPECT_NEAR(psi.pairing(*m.d, s)[0], ift, 1e-4 * std::max(1.0, std::abs(ift))) << s.id();
        }
    }
}

TEST(ClearingProperty, ReserveSeesPointValuesNotJustL2Norm)
{
    // cos and sin of 2 pi r have the same mean and L2 norm under U(0,1) but differ at the reserve 1/2.
    auto fx = test::build(test::from_json(one_bid_market(R"({"family": "uniform"})", "second_price_auction", "myerson", 0)));
    const auto& m = fx.m();
    const double tp = 2 * M_PI;
    population::ReportScore cosine("cos", [=](const Report& r) { return std::cos(tp * r.x[0]); },
                                   [=](const Report& r, int) { return -tp * std::sin(tp * r.x[0]); });
    population::ReportScore sine("sin", [=](const Report& r) { return std::sin(tp * r.x[0]); },
                                 [=](const Report& r, int) { return tp * std::cos(tp * r.x[0]); });
    const double dc = oracle::fd_conduct_derivative(m, cosine).value[0];
    const double ds = oracle::fd_conduct_derivative(m, sine).value[0];
    EXPECT_GT(std::abs(dc - ds), 1e-2);
    EXPECT_NEAR(dc, clearing::myerson_ift_functional(*m.d, 0.5, cosine), 1e-6);
    EXPECT_NEAR(ds, clearing::myerson_ift_functional(*m.d, 0.5, sine), 1e-6);
}

TEST(ClearingProperty, RandomSchoolCapacitiesKeepJacobianSigns)
{
    Gen g(33);
    auto spec = lab::catalog_scenario("two_school");
    for (int draw = 0; draw < 8; ++draw) {
        spec.conduct.q = {g.uniform(0.1, 0.35), g.uniform(0.1, 0.35)};
        auto fx = test::build(spec);
        const auto& J = fx.m().state.jacobian;
        EXPECT_LE(fx.m().state.residual, 1e-10);
        EXPECT_LE(J(0, 0), 0);
        EXPECT_LE(J(1, 1), 0);
        EXPECT_GE(J(0, 1), 0);
        EXPECT_GE(J(1, 0), 0);
    }
}

TEST(MpeProperty, DecompositionClosesAndZeroReformIsNull)
{
    for (const std::string id : {"rationing", "price_cutoff", "auction_fixed_q", "two_school"}) {
        auto spec = lab::catalog_scenario(id);
        auto fx = test::build(spec);
        for (const auto& ss : spec.scores) {
            const auto c = welfare::mpe_covariance(fx.m(), test::score(spec, ss.id));
            EXPECT_EQ(c.total(), c.direct + c.competition + c.conduct);
        }
        population::ScoreSpec zero;
        zero.id = "zero";
        zero.kind = "zero";
        const auto z = welfare::mpe_covariance(fx.m(), population::make_policy_score(zero, spec.policy_law, 256));
        EXPECT_EQ(z.total(), 0.0) << id;
    }
}

TEST(MpeProperty, MeanFunctionalIsAffineInOutcomes)
{
    Gen g(41);
    const auto coord = g.legendre();
    const auto base = test::from_json(one_bid_market(coord, "price_cutoff", "capacity", 0.3, "0.2 + r", "1 + r*r"));
    auto b = test::build(base);
    const double ref = welfare::mpe_covariance(b.m(), test::score(base, "binary_shift")).total();
    for (int i = 0; i < 5; ++i) {
        const double alpha = g.uniform(-3, 3), beta = g.uniform(-5, 5);
        std::ostringstream m0, m1;
        m0.precision(17);
        m1.precision(17);
        m0 << alpha << "*(0.2 + r) + " << beta;
        m1 << alpha << "*(1 + r*r) + " << beta;
        const auto spec = test::from_json(one_bid_market(coord, "price_cutoff", "capacity", 0.3, m0.str(), m1.str()));
        auto fx = test::build(spec);
        EXPECT_NEAR(welfare::mpe_covariance(fx.m(), test::score(spec, "binary_shift")).total(), alpha * ref, 1e-10);
    }
}

TEST(OracleProperty, ChannelsAddUp)
{
    for (const std::string id : {"price_cutoff", "auction_fixed_q"}) {
        const auto spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        auto fx = test::build(spec);
        const auto& m = fx.m();
        const auto grad = oracle::fd_gradient_c(m).value;
        for (const auto& ss : spec.scores) {
            const auto s = test::score(spec, ss.id);
            const double total = oracle::fd_mpe(pop, {}, s).value;
            const double direct = welfare::mpe_covariance(m, s).direct;
            const double comp = oracle::fd_partial_competition(m, s).value;
            const double cond = grad.dot(oracle::fd_conduct_derivative(m, mechanism::induced_report_score(*m.d, s)).value);
            EXPECT_LE(rel_or_abs(direct + comp + cond, total, 1e-6), 2e-3) << id << "/" << ss.id;
        }
    }
}

TEST(OracleProperty, RichardsonOrderIsTwo)
{
    for (const std::string id : {"rationing", "price_cutoff", "auction_fixed_q", "two_school"}) {
        const auto spec = lab::catalog_scenario(id);
        population::Population pop(spec, {});
        for (const auto& ss : spec.scores) {
            const auto r = oracle::fd_mpe(pop, {}, test::score(spec, ss.id));
            EXPECT_TRUE(r.order_ok) << id << "/" << ss.id << " order " << r.order;
        }
    }
}

TEST(LocalTauProperty, EstimateConvergesWithSampleSize)
{
    const auto spec = test::from_json(one_bid_market(R"({"family": "uniform"})", "price_cutoff", "capacity", 0.3, "0",
                                                     "1 + r", R"({"family": "normal", "sd": 0.5})"));
    auto fx = test::build(spec);
    const auto& m = fx.m();
    const double truth = externality::local_tau_oracle(m.gradient, 0).tau;
    // One seed's error need not fall monotonically; the mean over seeds does.
    std::vector<double> err;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
        double sum = 0;
        for (std::uint64_t seed = 5; seed < 9; ++seed) {
            auto agents = population::sample_population(spec, n, seed);
            mechanism::assign(*m.mech, agents, m.state.c, *m.d, spec.outcome_law, seed + 100);
            const auto est = externality::local_tau_estimated(agents, *m.mech, *m.d, m.state.c, m.gradient.margins[0]);
            EXPECT_LE(std::abs(est.tau - truth), 3 * est.se) << n << " seed " << seed;
            sum += std::abs(est.tau - truth);
        }
        err.push_back(sum / 4);
    }
    EXPECT_LT(err.back(), err.front());
}

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "mpelab/errors.hpp"
#include "mpelab/numerics/parallel.hpp"
#include "mpelab/numerics/quadrature.hpp"
#include "mpelab/numerics/rng.hpp"
#include "mpelab/numerics/roots.hpp"

using namespace mpelab::numerics;

TEST(Philox, KnownAnswerVectors)
{
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, SameAddressSameDraws)
{
    CounterRng a(11, stream_id(5, Purpose::report)), b(11, stream_id(5, Purpose::report));
    CounterRng c(11, stream_id(5, Purpose::noise));
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_NE(u, c.uniform());
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(CounterRng, AntitheticReflects)
{
    CounterRng a(3, 9), b(3, 9, true);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(a.uniform() + b.uniform(), 1.0, 1e-15);
}

TEST(CounterRng, UniformAndNormalMoments)
{
    CounterRng rng(1, 1);
    const int n = 200000;
    double su = 0, sz = 0, sz2 = 0;
    for (int i = 0; i < n; ++i) {
        su += rng.uniform();
        const double z = rng.normal();
        sz += z;
        sz2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sz / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(sz2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Quadrature, GaussLegendreExactForPolynomials)
{
    // Order 20 integrates degree 39 exactly.
    EXPECT_NEAR(gauss_legendre([](double x) { return std::pow(x, 39) + std::pow(x, 38); }, 0.0, 1.0),
                1.0 / 40 + 1.0 / 39, 1e-14);
    EXPECT_NEAR(gauss_legendre_panels([](double x) { return std::exp(x); }, 0.0, 2.0, 4), std::exp(2.0) - 1, 1e-13);
}

TEST(Quadrature, CompositeRuleAlignsWithBreakpoints)
{
    const CompositeRule rule(0.0, 1.0, 200, {0.3137});
    double s = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights()[i] * (rule.nodes()[i] >= 0.3137 ? 1.0 : 0.0);
    EXPECT_NEAR(s, 1 - 0.3137, 1e-14);
    EXPECT_NEAR(rule.integrate([](double) { return 1.0; }), 1.0, 1e-14);
}

TEST(Quadrature, InteriorBreakpointsSortedUnique)
{
    EXPECT_EQ(interior_breakpoints(0, 1, {0.5, -1, 0.2, 0.5, 1.0, 0.0}), (std::vector<double>{0.2, 0.5}));
}

TEST(Roots, BracketedNewtonAndToms)
{
    auto f = [](double x) { return x * x * x - 2; };
    auto df = [](double x) { return 3 * x * x; };
    EXPECT_NEAR(solve_bracketed(f, df, 0, 2).x, std::cbrt(2.0), 1e-12);
    EXPECT_NEAR(solve_bracketed(f, {}, 0, 2).x, std::cbrt(2.0), 1e-10);
    EXPECT_THROW(solve_bracketed(f, df, 2, 3), mpelab::InfeasibleError);
}

TEST(Roots, SignChangeBracketsLeftToRight)
{
    const auto br = sign_change_brackets([](double x) { return std::sin(x); }, 0.5, 10.0, 100);
    ASSERT_EQ(br.size(), 3u);
    EXPECT_LE(br[0].first, M_PI);
    EXPECT_GE(br[0].second, M_PI);
    EXPECT_LT(br[1].first, br[2].first);
}

TEST(Roots, DampedNewtonSolvesSystem)
{
    auto F = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(2);
        r << x(0) * x(0) + x(1) - 0.5, x(0) - x(1) * x(1);
        return r;
    };
    auto J = [](const Eigen::VectorXd& x) {
        Eigen::MatrixXd m(2, 2);
        m << 2 * x(0), 1, 1, -2 * x(1);
        return m;
    };
    const auto res = damped_newton(F, J, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                                   SolverOptions{50, 1e-13, 30});
    EXPECT_LT(res.residual, 1e-12);
    EXPECT_NEAR(res.x(0), res.x(1) * res.x(1), 1e-12);
}

TEST(Parallel, ChunkingDoesNotChangeResults)
{
    std::vector<double> one(1000), four(1000);
    auto body = [](std::vector<double>& out) {
        return [&out](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) out[i] = CounterRng(7, i).uniform();
        };
    };
    parallel_for(one.size(), body(one), 1);
    parallel_for(four.size(), body(four), 4);
    EXPECT_EQ(one, four);
}

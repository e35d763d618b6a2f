#include <cauchy2mm/montecarlo.hpp>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

using namespace cauchy2mm;

TEST(HarnadOrlov, ClosedFormValues)
{
    EXPECT_DOUBLE_EQ(harnad_orlov_rhs({2.0}, {3.0}), 0.2);
    // det[1/(x_i + y_j)] / (Delta(X) Delta(Y)) at X = (1, 2), Y = (1, 3): (1/60) / 2
    EXPECT_NEAR(harnad_orlov_rhs({1.0, 2.0}, {1.0, 3.0}), 1.0 / 120, 1e-17);
    EXPECT_TRUE(harnad_orlov_check({2.0}, {3.0}, 10, 1).ok());
}

TEST(HarnadOrlov, MonteCarloSmall)
{
    auto rep = harnad_orlov_check({1.0, 2.0}, {1.0, 3.0}, 20000, 3);
    EXPECT_TRUE(rep.ok()) << rep.checks().front().detail;
}

TEST(HarnadOrlov, InputValidation)
{
    EXPECT_THROW(harnad_orlov_check({1.0, 1.0}, {1.0, 2.0}, 10, 1), InputError);
    EXPECT_THROW(harnad_orlov_check({-1.0}, {1.0}, 10, 1), InputError);
    EXPECT_THROW(harnad_orlov_check({1.0}, {1.0, 2.0}, 10, 1), InputError);
}

TEST(Haar, UnitaryAndUniform)
{
    auto u = haar_unitary(4, std::uint64_t(5));
    EXPECT_LT((u * u.adjoint() - ComplexMatrixD::Identity(4, 4)).norm(), 1e-13);
    EXPECT_TRUE(verify_haar(3, 4000, 11).ok());
}

TEST(Statistics, BatchMean)
{
    std::vector<double> c(1000, 2.5);
    auto m = batch_mean(c);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.stderr_, 0.0);
}

TEST(Statistics, LaguerreMarginalCdf)
{
    EXPECT_EQ(laguerre_one_point_cdf(0), 0.0);
    EXPECT_NEAR(laguerre_one_point_cdf(60), 1.0, 1e-15);
    // derivative is E_1(x)
    const double h = 1e-6;
    EXPECT_NEAR((laguerre_one_point_cdf(1 + h) - laguerre_one_point_cdf(1 - h)) / (2 * h), boost::math::expint(1, 1.0), 1e-8);
    // exact quantiles have KS distance 1/(2n)
    std::vector<double> q;
    for (int i = 0; i < 200; ++i) {
        double lo = 0, hi = 60, t = (i + 0.5) / 200;
        for (int k = 0; k < 200; ++k) {
            double mid = (lo + hi) / 2;
            (laguerre_one_point_cdf(mid) < t ? lo : hi) = mid;
        }
        q.push_back((lo + hi) / 2);
    }
    EXPECT_NEAR(ks_distance(q, laguerre_one_point_cdf), 1.0 / 400, 1e-9);
}

TEST(Chain, DeterministicForFixedSeed)
{
    ChainSettings cs;
    cs.N = 2;
    cs.samples = 500;
    cs.seed = 17;
    auto a = GasChain(Weight::laguerre(), Weight::laguerre(), cs).run();
    auto b = GasChain(Weight::laguerre(), Weight::laguerre(), cs).run();
    ASSERT_EQ(a.states.size(), 500u);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        EXPECT_EQ(a.states[i].x, b.states[i].x);
        EXPECT_EQ(a.states[i].y, b.states[i].y);
    }
    cs.stream = 1;
    auto c = GasChain(Weight::laguerre(), Weight::laguerre(), cs).run();
    EXPECT_NE(a.states.back().x, c.states.back().x);
}

TEST(Chain, LogDensityMatchesFormula)
{
    GasState s{{1.0, 2.0}, {0.5, 3.0}};
    const double expect = -(1 + 2 + 0.5 + 3) + 2 * std::log(1.0) + 2 * std::log(2.5) -
                          (std::log(1.5) + std::log(4.0) + std::log(2.5) + std::log(5.0));
    EXPECT_NEAR(gas_log_density(s, Weight::laguerre(), Weight::laguerre()), expect, 1e-14);
}

TEST(Chain, OnePointMarginalAndPartitionFunction)
{
    PrecisionScope p(128);
    ChainSettings cs;
    cs.N = 1;
    cs.samples = 20000;
    cs.seed = 7;
    auto chain = GasChain(Weight::laguerre(), Weight::laguerre(), cs).run();
    std::vector<double> xs;
    for (const auto& s : chain.states)
        xs.push_back(s.x[0]);
    EXPECT_LT(ks_distance(xs, laguerre_one_point_cdf), 0.03);
    auto q = QuadratureSettings::with_tolerance(Real("1e-20"));
    const double za = hankel_normaliser(Weight::laguerre(), 1, q);
    EXPECT_NEAR(za, 1.0, 1e-15);
    EXPECT_TRUE(verify_partition_estimate(chain, 1.0, za, za).ok());
}

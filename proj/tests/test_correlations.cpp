#include <cauchy2mm/correlations.hpp>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

struct LaguerreGas : ::testing::Test {
    PrecisionScope scope{256};
    QuadratureSettings q = QuadratureSettings::with_tolerance(Real("1e-30"));
    BopFamily<Rational> fam = build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 5), 5);
    WeylSystem ws{Weight::laguerre(), Weight::laguerre(), q};
};

}  // namespace

TEST(Partition, LaguerreValues)
{
    auto t = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 3);
    EXPECT_EQ(partition_function(t, 1), Rational(1));
    EXPECT_EQ(partition_function(t, 2), Rational(1, 6));
    EXPECT_EQ(partition_function(t, 3), Rational(1, 90));
    EXPECT_EQ(factorial_of<Rational>(5), Rational(120));
}

TEST_F(LaguerreGas, OnePointFunctionAtNEqualsOne)
{
    CorrelationEngine eng(fam, ws, 1);
    // R^(1,0)(x) = e^{-x} \int e^{-y}/(x+y) dy = E_1(x); R^(1,1)(x, y) = e^{-x-y}/(x+y)
    EXPECT_NEAR(to_double(eng.correlation({Real(1)}, {})), boost::math::expint(1, 1.0), 1e-15);
    EXPECT_NEAR(to_double(eng.correlation({Real(1)}, {Real(2)})), std::exp(-3.0) / 3, 1e-15);
}

TEST_F(LaguerreGas, MassesEqualN)
{
    for (int N = 1; N <= 4; ++N) {
        CorrelationEngine eng(fam, ws, N);
        EXPECT_LT(abs(eng.one_point_mass(true) - N), Real("1e-20")) << N;
        EXPECT_LT(abs(eng.one_point_mass(false) - N), Real("1e-20")) << N;
    }
}

TEST_F(LaguerreGas, ReproducingAndAnnihilation)
{
    std::vector<std::pair<Real, Real>> pts{{Real("0.5"), Real("1.5")}, {Real(2), Real(3)}};
    EXPECT_TRUE(verify_reproducing(fam, 3, pts, 1e-20).ok());
    EXPECT_TRUE(verify_annihilation(CorrelationEngine(fam, ws, 3), pts, 1e-20).ok());
}

TEST_F(LaguerreGas, BlockIdentity)
{
    for (int N : {2, 3}) {
        CorrelationEngine eng(fam, ws, N);
        auto rep = verify_block_identity(eng, cut_points(Weight::laguerre(), N), cut_points(Weight::laguerre(), N), 1e-20);
        EXPECT_TRUE(rep.ok()) << N;
    }
}

TEST_F(LaguerreGas, KernelRoutesAgree)
{
    CorrelationEngine eng(fam, ws, 3);
    auto rep = verify_kernel_routes(eng, GammaKernels(CDSystem(fam, ws, 3)), random_kernel_samples(3, 9), 1e-20);
    EXPECT_TRUE(rep.ok());
}

TEST_F(LaguerreGas, SizeBoundsRejected)
{
    EXPECT_THROW(CorrelationEngine(fam, ws, 0), InputError);
    EXPECT_THROW(CorrelationEngine(fam, ws, 7), InputError);
}

#include <cauchy2mm/o1bridge.hpp>

#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

const Weight alpha = Weight::laguerre();

BimomentTable<Rational> model(int n_max) { return exact_bimoments(alpha, alpha.times_x(), n_max); }

}  // namespace

TEST(O1Bridge, PartitionValuesLaguerre)
{
    auto s = exact_skew_table(alpha, 5);
    EXPECT_EQ(o1_partition_from_pfaffian(s, 1), Rational(1, 6));
    EXPECT_EQ(o1_partition_from_pfaffian(s, 2), Rational(1, 700));
    EXPECT_EQ(o1_partition_from_pfaffian(s, 3), Rational(2, 169785));
}

TEST(O1Bridge, SkewSplitEntries)
{
    // M_01 = (1/2)(2/3 - 1/3) from I_ab = a! b!/(a + b + 1)
    auto s = exact_skew_table(alpha, 2);
    EXPECT_EQ(s(0, 1), Rational(1, 6));
    EXPECT_EQ(s(1, 0), Rational(-1, 6));
    EXPECT_EQ(s(1, 1), Rational(0));
    EXPECT_EQ(s.moments[2], Rational(2));
}

TEST(O1Bridge, PfaffianSquaresExactlyForEvenN)
{
    auto m = model(5);
    auto s = exact_skew_table(alpha, 5);
    for (int N : {2, 4, 6}) {
        auto rep = verify_pfaffian_identity(m, s, N, Real(0));
        EXPECT_TRUE(rep.ok()) << N;
        EXPECT_EQ(rep.worst_residual("pfaffian_square"), 0.0) << N;
        EXPECT_EQ(rep.worst_residual("partition_squaring"), 0.0) << N;
    }
}

TEST(O1Bridge, PfaffianIdentityInBigFloat)
{
    PrecisionScope p(256);
    auto s = real_skew_table(alpha, 3, QuadratureSettings::with_tolerance(Real("1e-30")));
    auto m = quadrature_bimoments(alpha, alpha.times_x(), 3, Real(0), QuadratureSettings::with_tolerance(Real("1e-30")));
    EXPECT_TRUE(verify_pfaffian_identity(m, s, 4, Real("1e-25")).ok());
}

TEST(O1Bridge, OddSizeNeedsFlagAndIsNotAsserted)
{
    auto m = model(3);
    auto s = exact_skew_table(alpha, 3);
    EXPECT_THROW(verify_pfaffian_identity(m, s, 3, Real(0)), InputError);
    auto rep = verify_pfaffian_identity(m, s, 3, Real(0), true);
    bool odd_note = false;
    for (const auto& c : rep.checks())
        if (c.check == "odd_det_I")
            odd_note = !c.asserted;
    EXPECT_TRUE(odd_note);
}

TEST(O1Bridge, RejectsOtherBeta)
{
    auto wrong = exact_bimoments(alpha, alpha, 3);
    EXPECT_THROW(verify_pfaffian_identity(wrong, exact_skew_table(alpha, 3), 2, Real(0)), InputError);
}

TEST(O1Bridge, DirectQuadratureMatchesPfaffian)
{
    EXPECT_NEAR(o1_partition_quadrature(alpha), 1.0 / 6, 1e-8 / 6);
}

TEST(O1Bridge, DirectMonteCarloWithinErrorBars)
{
    auto mc1 = o1_partition_mc(alpha, 1, 50000, 11);
    EXPECT_LT(std::abs(mc1.mean - 1.0 / 6), 4 * mc1.stderr_);
    auto mc2 = o1_partition_mc(alpha, 2, 50000, 11);
    EXPECT_LT(std::abs(mc2.mean - 1.0 / 700), 4 * mc2.stderr_);
    EXPECT_THROW(o1_partition_mc(alpha, 3, 10, 1), InputError);
}

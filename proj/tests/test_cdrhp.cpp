#include <cauchy2mm/cdrhp.hpp>

#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

struct LaguerreWindow : ::testing::Test {
    PrecisionScope scope{256};
    QuadratureSettings q = QuadratureSettings::with_tolerance(Real("1e-30"));
    BopFamily<Rational> fam = build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(1), 5), 5);
    WeylSystem ws{Weight::laguerre(), Weight::laguerre(1), q};
};

}  // namespace

TEST_F(LaguerreWindow, ChristoffelDarbouxAndDuality)
{
    const auto samples = random_sample_pairs(3, 11);
    for (int n : {2, 3}) {
        auto rep = verify_cd_duality(CDSystem(fam, ws, n), samples, 1e-20);
        EXPECT_TRUE(rep.ok()) << (rep.first_failure() ? rep.first_failure()->check : "");
        EXPECT_EQ(rep.checks().size(), 9u);
    }
}

TEST_F(LaguerreWindow, MirroredIdentities)
{
    const auto samples = random_sample_pairs(2, 5);
    auto rep = verify_cd_duality(CDSystem(mirror_family(fam), ws.swapped(), 3), samples, 1e-20, "_mirror");
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.checks().front().check, "cd_identity_mirror");
}

TEST_F(LaguerreWindow, RiemannHilbertProblem)
{
    for (int n : {2, 3}) {
        auto rep = verify_rhp(CDSystem(fam, ws, n));
        EXPECT_TRUE(rep.ok()) << (rep.first_failure() ? rep.first_failure()->check + " " + rep.first_failure()->point : "");
        EXPECT_LT(rep.worst_residual("minor_ratio"), 1e-3);
    }
}

TEST_F(LaguerreWindow, WindowBoundsRejected)
{
    EXPECT_THROW(CDSystem(fam, ws, 1), InputError);
    EXPECT_THROW(CDSystem(fam, ws, 5), InputError);
}

TEST(CdSamples, DeterministicAndAwayFromAntidiagonal)
{
    auto a = random_sample_pairs(20, 7), b = random_sample_pairs(20, 7);
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].z, b[i].z);
        EXPECT_EQ(a[i].w, b[i].w);
        EXPECT_GT(cabs(a[i].z + a[i].w), Real("0.25"));
        EXPECT_GE(abs(a[i].z.imag()), Real("0.29"));
    }
}

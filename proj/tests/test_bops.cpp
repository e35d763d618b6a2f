#include <cauchy2mm/bops.hpp>

#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

BopFamily<Rational> laguerre_family(int n) { return build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), n), n); }

Polynomial<Rational> poly(std::initializer_list<Rational> c) { return Polynomial<Rational>(std::vector<Rational>(c)); }

}  // namespace

TEST(Bops, LowDegreeLaguerreOracles)
{
    auto f = laguerre_family(3);
    EXPECT_EQ(f.monic_p[0], poly({Rational(1)}));
    EXPECT_EQ(f.monic_p[1], poly({Rational(-1, 2), Rational(1)}));
    EXPECT_EQ(f.monic_p[2], poly({Rational(1, 3), Rational(-2), Rational(1)}));
    EXPECT_EQ(f.monic_q[2], f.monic_p[2]);    // alpha = beta
    EXPECT_EQ(f.c2[0], Rational(1));
    EXPECT_EQ(f.c2[1], Rational(1, 12));
    EXPECT_EQ(f.c2[2], Rational(1, 45));
}

TEST(Bops, BiorthonormalityExact)
{
    auto f = laguerre_family(8);
    for (int j = 0; j <= 8; ++j)
        for (int k = 0; k <= 8; ++k)
            EXPECT_EQ(pairing(f.monic_p[j], f.monic_q[k], f.table), j == k ? f.c2[j] : Rational(0)) << j << "," << k;
    EXPECT_TRUE(verify_family(f, Real(0)).ok());
}

TEST(Bops, OrthonormalFamilyInBigFloat)
{
    PrecisionScope p(256);
    auto f = build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 6).to_real(), 6);
    for (int j = 0; j <= 6; ++j)
        for (int k = 0; k <= 6; ++k)
            EXPECT_LT(abs(pairing(f.p[j], f.q[k], f.table) - (j == k ? 1 : 0)), Real("1e-60"));
}

TEST(Bops, FourTermRecurrenceExact)
{
    auto f = laguerre_family(6);
    auto rep = verify_recurrence(f, Real(0));
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.worst_residual("four_term_recurrence"), 0.0);
}

TEST(Bops, FourTermRecurrenceBigFloat)
{
    PrecisionScope p(256);
    auto f = build_family(exact_bimoments(Weight::laguerre(), Weight::laguerre(), 12).to_real(), 12);
    auto rep = verify_recurrence(f, Real("1e-30"));
    EXPECT_TRUE(rep.ok());
    EXPECT_LT(rep.worst_residual("four_term_recurrence"), 1e-30);
}

TEST(Bops, ZerosSimplePositiveInterlacing)
{
    PrecisionScope p(256);
    auto f = laguerre_family(10);
    std::vector<ZeroSet> zs;
    EXPECT_TRUE(zeros_and_interlacing(f, Real("1e-40"), &zs).ok());
    // p~_2 = x^2 - 2x + 1/3 has zeros 1 -+ sqrt(2/3)
    for (const auto& z : zs)
        if (z.degree == 2 && z.family == 'p') {
            ASSERT_EQ(z.zeros.size(), 2u);
            EXPECT_LT(abs(z.zeros[0] - (1 - sqrt(Real(2) / 3))), Real("1e-39"));
            EXPECT_LT(abs(z.zeros[1] - (1 + sqrt(Real(2) / 3))), Real("1e-39"));
        }
}

TEST(Bops, HalfGaussianZerosInterlace)
{
    PrecisionScope p(256);
    Weight g(Rational(0), {Rational(0), Rational(0), Rational(1)}, {{Rational(0), Rational(4)}});
    auto t = quadrature_bimoments(g, Weight::laguerre(), 10, Real(0), QuadratureSettings::with_tolerance(Real("1e-30")));
    auto f = build_family(t, 10);
    EXPECT_TRUE(verify_family(f, Real("1e-25")).ok());
    EXPECT_TRUE(zeros_and_interlacing(f, Real("1e-25")).ok());
}

TEST(Bops, MirrorFamilySwapsRoles)
{
    auto t = exact_bimoments(Weight::laguerre(1), Weight::laguerre(0), 4);
    auto f = build_family(t, 4);
    auto m = mirror_family(f);
    for (int n = 0; n <= 4; ++n) {
        EXPECT_EQ(m.monic_p[n], f.monic_q[n]);
        EXPECT_EQ(m.monic_q[n], f.monic_p[n]);
        EXPECT_EQ(m.c2[n], f.c2[n]);
    }
}

TEST(Bops, HatPolynomialsAnnihilateMoments)
{
    // the hat polynomial pairs to minus the beta moments against every y^k, k <= n
    auto f = laguerre_family(5);
    for (int n = 0; n <= 5; ++n)
        for (int k = 0; k <= n; ++k)
            EXPECT_EQ(pairing(f.hat_p[n], Polynomial<Rational>::monomial(k), f.table), -f.table.beta_moments[k]) << n << "," << k;
}

#include <cauchy2mm/bimoments.hpp>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

Weight half_gaussian() { return Weight(Rational(0), {Rational(0), Rational(0), Rational(1)}, {{Rational(0), Rational(4)}}); }

Rational factorial(int n)
{
    Rational f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

}  // namespace

TEST(Bimoments, LaguerreClosedForm)
{
    auto t = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 10);
    for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; ++k)
            EXPECT_EQ(t(j, k), factorial(j) * factorial(k) / (j + k + 1)) << j << "," << k;
    EXPECT_EQ(t.D(2), Rational(1, 12));
    EXPECT_EQ(t.D(3), Rational(1, 540));
}

TEST(Bimoments, ShiftedPowersAndRate)
{
    // \int\int x^{j+1} y^k e^{-2x-2y}/(x+y) = (j+1)! k! / ((j+k+2) 2^{j+k+2})
    auto t = exact_bimoments(Weight::laguerre(1, Rational(2)), Weight::laguerre(0, Rational(2)), 3);
    for (int j = 0; j <= 3; ++j)
        for (int k = 0; k <= 3; ++k) {
            Rational e = factorial(j + 1) * factorial(k) / (j + k + 2);
            for (int i = 0; i < j + k + 2; ++i)
                e /= 2;
            EXPECT_EQ(t(j, k), e);
        }
    EXPECT_THROW(exact_bimoments(Weight::laguerre(0, Rational(1)), Weight::laguerre(0, Rational(2)), 2), InputError);
}

TEST(Bimoments, QuadratureMatchesExactLaguerre)
{
    PrecisionScope p(256);
    auto ex = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 10);
    auto q = quadrature_bimoments(Weight::laguerre(), Weight::laguerre(), 10, Real(0), QuadratureSettings::with_tolerance(Real("1e-30")));
    for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; ++k)
            EXPECT_LT(abs(q(j, k) / to_real(ex(j, k)) - 1), Real("1e-28"));
}

TEST(Bimoments, FractionalPowersMatchGammaFormula)
{
    PrecisionScope p(128);
    // \int\int x^{a+j} y^{b+k} e^{-x-y}/(x+y) = Gamma(a+j+1) Gamma(b+k+1)/(a+b+j+k+1)
    Weight wa(Rational(1, 2), {Rational(0), Rational(1)}, {{Rational(0), std::nullopt}});
    Weight wb(Rational(-1, 3), {Rational(0), Rational(1)}, {{Rational(0), std::nullopt}});
    auto q = quadrature_bimoments(wa, wb, 1, Real(0), QuadratureSettings::with_tolerance(Real("1e-10")));
    for (int j = 0; j <= 1; ++j)
        for (int k = 0; k <= 1; ++k) {
            Real a = Real(1) / 2 + j, b = Real(-1) / 3 + k;
            Real e = tgamma(a + 1) * tgamma(b + 1) / (a + b + 1);
            EXPECT_LT(abs(q(j, k) / e - 1), Real("1e-10")) << j << "," << k;
        }
}

TEST(Bimoments, HalfGaussianAgainstOneDimensionalReduction)
{
    PrecisionScope p(128);
    // I_00 = \int_0^4 e^{-x^2} e^{x} E_1(x) dx, reduced with the y-integral in closed form
    auto q = quadrature_bimoments(half_gaussian(), Weight::laguerre(), 1, Real(0), QuadratureSettings::with_tolerance(Real("1e-20")));
    EXPECT_NEAR(to_double(q(0, 0)), 1.048171635708579560, 1e-15);
    PanelList panels = refine_toward(graded(Real(0), Real(4), Real(0), Real("0.25"), Real("0.25")), Complex(0), ldexp(Real(1), -60));
    Real i00 = integrate_panels(panels, 20, [](const Real& x) {
        const double xd = to_double(x);
        return Real(std::exp(-xd * xd + xd) * boost::math::expint(1, xd));
    });
    EXPECT_NEAR(to_double(q(0, 0)), to_double(i00), 1e-12);
}

TEST(Bimoments, DivergentOriginRejected)
{
    Weight w(Rational(-3, 5), {Rational(0), Rational(1)}, {{Rational(0), std::nullopt}});
    // x^{-3/5} y^{-3/5}/(x+y) has total order -11/5 at the origin: not integrable
    EXPECT_THROW(quadrature_bimoments(w, w, 1, Real(0), QuadratureSettings::with_tolerance(Real("1e-8"))), InputError);
    EXPECT_THROW(check_kernel_exponent(Real(-1)), InputError);
}

TEST(Bimoments, TotalPositivityLaguerreExact)
{
    auto t = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 5);
    auto rep = check_total_positivity(t, 6);
    EXPECT_TRUE(rep.ok());
}

TEST(Bimoments, TotalPositivityDetectsNonPositiveMinor)
{
    auto t = exact_bimoments(Weight::laguerre(), Weight::laguerre(), 2);
    t.entries(0, 1) = t.entries(0, 0) * t.entries(1, 1) / t.entries(1, 0);    // singular 2x2 leading minor
    auto rep = check_total_positivity(t, 2);
    EXPECT_FALSE(rep.ok());
}

TEST(Bimoments, SignRegularPattern)
{
    // kernel (x+y)^{-1-h} with 1 + h = -1/2: sign (-1)^{sum_{j<N} min(j, 1)}
    EXPECT_EQ(sign_regular_pattern(Real("-1.5"), 1), 1);
    EXPECT_EQ(sign_regular_pattern(Real("-1.5"), 2), -1);
    EXPECT_EQ(sign_regular_pattern(Real("-1.5"), 3), 1);
    std::vector<Real> xs{Real("0.5"), Real(1), Real(2), Real(3)}, ys{Real("0.25"), Real("1.5"), Real("2.5"), Real(4)};
    EXPECT_TRUE(check_sign_regularity(xs, ys, Real("-1.5"), 4).ok());
    EXPECT_TRUE(check_sign_regularity(xs, ys, Real("-3.3"), 4).ok());
}

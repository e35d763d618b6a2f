#include <cauchy2mm/measures.hpp>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

nlohmann::json parse(const char* s) { return nlohmann::json::parse(s); }

std::string input_error(const char* s)
{
    try {
        Weight::from_json(parse(s), "w.json#");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Weight, JsonRoundTrip)
{
    auto w = Weight::from_json(parse(R"({"a": "1/2", "poly": [0, 0, 1], "support": [[0, 4]], "scale": 2})"));
    EXPECT_EQ(w.power(), Rational(1, 2));
    EXPECT_TRUE(w.bounded());
    EXPECT_TRUE(w.singular_at_zero());
    auto back = Weight::from_json(w.to_json());
    EXPECT_EQ(back.power(), w.power());
    EXPECT_EQ(back.poly(), w.poly());
    EXPECT_EQ(back.scale(), Rational(2));
}

TEST(Weight, JsonErrorsCarryPointer)
{
    EXPECT_EQ(input_error(R"({"a": 0, "poly": [0, 1], "support": [[0, "inf"]], "colour": 1})"), "w.json#/colour: unknown field");
    EXPECT_NE(input_error(R"({"a": 0, "poly": [0, "x"], "support": [[0, "inf"]]})").find("/poly/1"), std::string::npos);
    EXPECT_NE(input_error(R"({"a": 0, "poly": [0, 1]})").find("/support"), std::string::npos);
    EXPECT_NE(input_error(R"({"a": 0, "poly": [0, -1], "support": [[0, "inf"]]})").find("/poly"), std::string::npos);
    EXPECT_NE(input_error(R"({"a": 0, "support": [[2, 1]]})").find("/support/0"), std::string::npos);
    EXPECT_NE(input_error(R"({"a": 0, "support": [[-1, 1]]})").find("/support/0"), std::string::npos);
    EXPECT_NE(input_error(R"([1, 2])").find("w.json#"), std::string::npos);
}

TEST(Weight, ExponentialFormDetection)
{
    EXPECT_TRUE(Weight::laguerre().exponential_form().has_value());
    auto f = Weight::laguerre(2, Rational(3)).exponential_form();
    ASSERT_TRUE(f);
    EXPECT_EQ(f->power, 2);
    EXPECT_EQ(f->rate, Rational(3));
    Weight g(Rational(0), {Rational(0), Rational(0), Rational(1)}, {{Rational(0), Rational(4)}});
    EXPECT_FALSE(g.exponential_form().has_value());
}

// Regression: the cut used to land below the peak of x^d e^{-x} for loose tolerances.
TEST(Weight, TailCutBeyondPeakAtLooseTolerance)
{
    PrecisionScope p(128);
    const auto w = Weight::laguerre();
    for (const char* tol : {"1e-6", "1e-12", "1e-20"}) {
        Real cut = w.tail_cut(20, Real(tol));
        EXPECT_GT(cut, 20) << tol;
        // x^20 e^{-x} at the cut is below tol times its peak value at x = 20
        Real ratio = exp(20 * log(cut / 20) - (cut - 20));
        EXPECT_LT(ratio, Real(tol)) << tol;
    }
}

TEST(Measure, LaguerreMomentsAreFactorials)
{
    PrecisionScope p(256);
    auto m = Measure::of(Weight::laguerre(), QuadratureSettings::with_tolerance(Real("1e-30"))).moments(12);
    Real f = 1;
    for (int k = 0; k <= 12; ++k) {
        if (k)
            f *= k;
        EXPECT_LT(abs(m[k] / f - 1), Real("1e-28")) << k;
    }
}

TEST(Measure, HalfGaussianMomentsMatchQuadrature)
{
    PrecisionScope p(256);
    Weight g(Rational(0), {Rational(0), Rational(0), Rational(1)}, {{Rational(0), Rational(4)}});
    auto m = Measure::of(g, QuadratureSettings::with_tolerance(Real("1e-30"))).moments(1);
    // \int_0^4 e^{-x^2} = sqrt(pi)/2 erf(4); \int_0^4 x e^{-x^2} = (1 - e^{-16})/2
    EXPECT_LT(abs(m[0] - sqrt(pi_real()) / 2 * erf(Real(4))), Real("1e-28"));
    EXPECT_LT(abs(m[1] - (1 - exp(Real(-16))) / 2), Real("1e-28"));
}

TEST(Measure, StieltjesTransformOfLaguerre)
{
    PrecisionScope p(128);
    auto mu = Measure::of(Weight::laguerre(), QuadratureSettings::with_tolerance(Real("1e-25")));
    // \int e^{-s}/(x + s) ds = e^x E_1(x)
    for (double x : {0.5, 1.0, 3.0}) {
        const double expect = std::exp(x) * boost::math::expint(1, x);
        EXPECT_NEAR(to_double(mu.stieltjes(Real(x))), expect, 1e-14 * expect) << x;
    }
}

TEST(Measure, WeylFunctionOffAxisAgreesWithSeries)
{
    PrecisionScope p(128);
    auto mu = Measure::of(Weight::laguerre(), QuadratureSettings::with_tolerance(Real("1e-25")));
    // far from the support W(z) ~ sum_k k!/z^{k+1}; with |z| = 60 the first 30 terms are accurate to < 1e-18
    const Complex z(Real(-40), Real(45));
    Complex s(0), zk = cinv(z);
    Real f = 1;
    for (int k = 0; k < 30; ++k) {
        if (k)
            f *= k;
        s += zk * f;
        zk = zk * cinv(z);
    }
    EXPECT_LT(to_double(cabs(mu.weyl(z) - s)), 1e-16);
}

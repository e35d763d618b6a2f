#include <cauchy2mm/equilibrium.hpp>

#include <gtest/gtest.h>

using namespace cauchy2mm;

namespace {

PotentialPair log_confined()
{
    auto p = PotentialPair::symmetric_linear();
    p.v1.log_coef = 1;
    p.v2.log_coef = 1;
    return p;
}

}  // namespace

TEST(Action, GradientMatchesFiniteDifferences)
{
    EXPECT_TRUE(verify_action_gradient(PotentialPair::symmetric_linear(), 20, 3).ok());
    EXPECT_TRUE(verify_action_gradient(log_confined(), 20, 3).ok());
}

TEST(Action, SingleParticleValue)
{
    // n = 1: S = V1(x) + V2(y) + log(x - y)
    auto a = action({2.0}, {-1.0}, PotentialPair::symmetric_linear());
    EXPECT_NEAR(a.value, 2 + 1 + std::log(3.0), 1e-15);
    EXPECT_NEAR(a.gradient[0], 1 + 1.0 / 3, 1e-15);
    EXPECT_NEAR(a.gradient[1], -1 - 1.0 / 3, 1e-15);
}

// With V1 = x - ln x, V2 = -y - ln(-y), n = 1: 1 - 1/x + 1/(x - y) = 0 and its mirror give x = -y = 1/2.
TEST(Minimiser, SingleParticleLogConfined)
{
    auto g = minimize(log_confined(), 1);
    EXPECT_NEAR(g.x[0], 0.5, 1e-6);
    EXPECT_NEAR(g.y[0], -0.5, 1e-6);
    // brute-force grid confirms it is the minimum
    double best = 1e300, bx = 0, by = 0;
    for (int i = 1; i <= 200; ++i)
        for (int j = 1; j <= 200; ++j) {
            double x = i * 0.01, y = -j * 0.01;
            double v = action({x}, {y}, log_confined()).value;
            if (v < best) {
                best = v;
                bx = x;
                by = y;
            }
        }
    EXPECT_NEAR(bx, 0.5, 0.011);
    EXPECT_NEAR(by, -0.5, 0.011);
}

TEST(Minimiser, LinearPotentialsPinAtTheWall)
{
    MinimizeOptions o;
    auto g = minimize(PotentialPair::symmetric_linear(), 1, o);
    EXPECT_NEAR(g.x[0], o.delta, 1e-12);
    EXPECT_NEAR(g.y[0], -o.delta, 1e-12);
}

TEST(Minimiser, MirrorSymmetryAndOrdering)
{
    for (const auto& pot : {PotentialPair::symmetric_linear(), log_confined()}) {
        auto g = minimize(pot, 30);
        EXPECT_LE(g.force, 1e-7);
        for (int i = 0; i < 30; ++i) {
            EXPECT_NEAR(g.y[i], -g.x[29 - i], 1e-6);
            if (i)
                EXPECT_LT(g.x[i - 1], g.x[i]);
        }
    }
}

TEST(Minimiser, NonConvergenceIsANumericalError)
{
    MinimizeOptions o;
    o.max_iters = 3;
    EXPECT_THROW(minimize(log_confined(), 20, o), NumericalError);
}

TEST(Curve, LinearPotentialFormulasAreConstant)
{
    auto pot = PotentialPair::symmetric_linear();
    SpectralCurve c(minimize(pot, 20), pot);
    for (const auto& z : curve_grid()) {
        auto v = c.at(z);
        EXPECT_NEAR(std::abs(v.r_potential - cdouble(1.0 / 3)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(v.d_potential - cdouble(-2.0 / 27)), 0.0, 1e-12);
    }
    EXPECT_THROW(c.at(cdouble(c.gas().x[5], 0)), InputError);
}

TEST(Curve, GridShape)
{
    auto g = curve_grid();
    ASSERT_EQ(g.size(), 20u);
    for (const auto& z : g)
        EXPECT_GE(std::abs(z.imag()), 1.0);
}

TEST(Curve, LogConfinedResidualShrinksWithN)
{
    auto pot = log_confined();
    auto s25 = summarize_curve(SpectralCurve(minimize(pot, 25), pot), curve_grid());
    auto s50 = summarize_curve(SpectralCurve(minimize(pot, 50), pot), curve_grid());
    EXPECT_LT(s50.cubic, s25.cubic);
    EXPECT_LT(s50.r_gap, s25.r_gap);
    EXPECT_LT(s50.cubic, 0.05);
}

TEST(Bands, SplitOnLargeGaps)
{
    auto b = support_bands({1.0, 1.1, 1.2, 1.3, 5.0, 5.1, 5.2});
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0].first, 1.0);
    EXPECT_DOUBLE_EQ(b[1].second, 5.2);
}

TEST(Potentials, JsonValidation)
{
    auto ok = PotentialPair::from_json(nlohmann::json::parse(R"({"T": 1, "V1": {"poly": [0, 1], "log": 1}, "V2": {"poly": [0, -1], "log": 1}})"), "p#");
    EXPECT_EQ(ok.v1.log_coef, 1);
    auto bad = [](const char* s) { return PotentialPair::from_json(nlohmann::json::parse(s), "p#"); };
    EXPECT_THROW(bad(R"({"T": 1, "V1": {"poly": [0, 1]}})"), InputError);
    EXPECT_THROW(bad(R"({"T": 1, "V1": {"poly": [0, -1]}, "V2": {"poly": [0, -1]}})"), InputError);
    EXPECT_THROW(bad(R"({"T": 0, "V1": {"poly": [0, 1]}, "V2": {"poly": [0, -1]}})"), InputError);
    EXPECT_THROW(bad(R"({"T": 1, "V1": {"poly": [0, 1], "spin": 2}, "V2": {"poly": [0, -1]}})"), InputError);
}

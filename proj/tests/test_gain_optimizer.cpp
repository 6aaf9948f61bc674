#include <gtest/gtest.h>

#include <random>

#include "nief/gain_optimizer.hpp"

using namespace nief;
using namespace nief::opt;

namespace {

// Open V scheme: the strong field on n-m pulls population out of the ground
// level n, and pumping into g raises the upper probe level.
LevelScheme open_vscheme() {
    LevelScheme s;
    s.width = {1, 1, 1, 1, 1, 0.05};
    s.decay = {1, 1, 1, 1};
    s.pump = {0, 0.3, 1, 0};
    return s;
}

} // namespace

TEST(Optimizer, SodiumOptimumSitsAtZeroInversion) {
    auto m = sodium::sodium_helium_550K();
    auto p = sodium_problem(m, 200);
    auto r = optimize(p);
    ASSERT_TRUE(r.feasible);
    const double kstar = sodium::zero_inversion_kappa(m, sodium::Branch::Full);
    EXPECT_NEAR(r.x[0], kstar, 0.01 * kstar);
    // the simplified rate-equation root is near 77
    EXPECT_NEAR(r.x[0], 77, 0.2 * 77);
    EXPECT_GT(r.objective, 0);
    EXPECT_LE(r.inversion, 0);
}

TEST(Optimizer, CollapsedBoundsReturnThePoint) {
    VSchemeSearch in;
    in.scheme = open_vscheme();
    in.rabi_sq = {"rabi_sq", 2.5, 2.5};
    in.omega3 = {"omega3", -0.3, -0.3};
    auto r = optimize(vscheme_problem(in));
    ASSERT_EQ(r.x.size(), 2u);
    EXPECT_EQ(r.x[0], 2.5);
    EXPECT_EQ(r.x[1], -0.3);
}

TEST(Optimizer, BeatsRandomFeasiblePoints) {
    VSchemeSearch in;
    in.scheme = open_vscheme();
    in.rabi_sq = {"rabi_sq", 0, 20};
    in.omega3 = {"omega3", -5, 5};
    auto p = vscheme_problem(in);
    auto r = optimize(p);
    ASSERT_TRUE(r.feasible);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> a(0, 20), b(-5, 5);
    int audited = 0;
    while (audited < 100) {
        auto e = p.evaluate({a(rng), b(rng)});
        if (e.inversion > 0) continue;
        EXPECT_GE(r.objective, e.objective);
        ++audited;
    }
}

TEST(Optimizer, GainNonNegativeWhenThresholdReachable) {
    auto s = open_vscheme();
    auto model = rate_balance_populations(s);
    auto t = find_gain_threshold(s, model, 0, 20);
    ASSERT_TRUE(t.has_value());
    VSchemeSearch in;
    in.scheme = s;
    in.rabi_sq = {"rabi_sq", 0, 20};
    auto r = optimize(vscheme_problem(in));
    EXPECT_GE(r.objective, 0);
}

TEST(Optimizer, ReproducibleBitForBit) {
    VSchemeSearch in;
    in.scheme = open_vscheme();
    in.objective = Objective::MaxGain;
    in.rabi_sq = {"rabi_sq", 0, 10};
    in.omega3 = {"omega3", -3, 3};
    in.seed = 7;
    auto a = optimize(vscheme_problem(in));
    auto b = optimize(vscheme_problem(in));
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Optimizer, PumpRateVariableAndBandwidthObjective) {
    VSchemeSearch in;
    in.scheme = open_vscheme();
    in.objective = Objective::GainBandwidth;
    in.rabi_sq = {"rabi_sq", 0, 10};
    in.omega3 = {"omega3", 0, 0};
    in.pumps = {{PumpTarget::g, {"pump.g", 0, 0.9}}};
    auto r = optimize(vscheme_problem(in));
    ASSERT_EQ(r.x.size(), 3u);
    EXPECT_TRUE(r.feasible);
    EXPECT_GT(r.objective, 0);
}

TEST(Optimizer, InfeasibleProblemIsReported) {
    OptimizationProblem p;
    p.variables = {{"x", 0, 1}};
    p.evaluate = [](const std::vector<double>& x) { return Evaluation{x[0], 1.0}; };
    try {
        optimize(p);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), NumericalError::Kind::Infeasible);
    }
}

TEST(Optimizer, SimplexRefinesPastTheGrid) {
    OptimizationProblem p;
    p.variables = {{"x", -1, 1}, {"y", -1, 1}};
    p.evaluate = [](const std::vector<double>& x) {
        return Evaluation{-(x[0] - 0.123) * (x[0] - 0.123) - (x[1] + 0.456) * (x[1] + 0.456), -1};
    };
    auto r = optimize(p);
    EXPECT_NEAR(r.x[0], 0.123, 1e-6);
    EXPECT_NEAR(r.x[1], -0.456, 1e-6);
    p.variables[0].hi = std::numeric_limits<double>::infinity();
    EXPECT_THROW(optimize(p), ValidationError);
}

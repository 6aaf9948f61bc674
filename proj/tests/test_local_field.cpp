#include <gtest/gtest.h>

#include <random>

#include "nief/local_field.hpp"

using namespace nief;
using namespace nief::local_field;

namespace {

LevelScheme lambda_scheme(double gamma_ln = 0.01) {
    LevelScheme s;
    s.width = {1, 1, 1, 1, gamma_ln, 1};
    s.pump = {1, 0, 0, 0};
    return s;
}

// Config whose shift is exactly delta for Gamma_lm = 1 (in units of 1/s).
LocalFieldConfig config_for_shift(double delta) {
    LocalFieldConfig c;
    c.dipole = units::debye;
    c.density = delta * 3 * units::eps0 * units::hbar / (c.dipole * c.dipole);
    return c;
}

} // namespace

TEST(LocalField, ClausiusMossottiDiluteLimit) {
    auto d = clausius_mossotti(cplx(0.7, 0.2), 0.0);
    EXPECT_EQ(d.L, cplx(1));
    EXPECT_EQ(d.epsilon, cplx(1));
    auto e = clausius_mossotti(cplx(0.7, 0.2), 1e-9);
    EXPECT_NEAR(std::abs(e.L - 1.0), 0, 1e-9);
}

TEST(LocalField, ClausiusMossottiIdentity) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 1000; ++k) {
        cplx alpha(u(rng), u(rng));
        double N = std::abs(u(rng));
        auto d = clausius_mossotti(alpha, N);
        EXPECT_LT(std::abs((d.epsilon + 2.0) / 3.0 - d.L), 1e-12 * std::abs(d.L));
    }
}

TEST(LocalField, RealPolarizabilityGivesRealEpsilonAboveOne) {
    auto d = clausius_mossotti(0.4, 2.0);
    EXPECT_EQ(d.epsilon.imag(), 0);
    EXPECT_GT(d.epsilon.real(), 1);
}

TEST(LocalField, LorentzCatastropheIsSignalled) {
    try {
        clausius_mossotti(1.5, 2.0);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), NumericalError::Kind::LorentzCatastrophe);
    }
}

TEST(LocalField, ShiftFormulaAndSelfBroadeningRatio) {
    LocalFieldConfig c;
    c.dipole = units::debye;
    c.density = 1e23;
    // SI evaluation for 1 D at 1e23 m^-3.
    EXPECT_NEAR(shift(c), 3.97e8, 0.01e8);
    EXPECT_DOUBLE_EQ(shift(c), c.dipole * c.dipole * c.density / (3 * units::eps0 * units::hbar));
    EXPECT_DOUBLE_EQ(width_ratio(c, self_broadening_width(c)), 2.0);
}

TEST(LocalField, DiluteLimitReproducesClosedFormLambdaResponse) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.2, 3);
    for (int k = 0; k < 50; ++k) {
        LevelScheme s;
        s.width = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        s.pump = {1, 0, 0, 0};
        FieldSet f;
        f.rabi[2] = cplx(u(rng), u(rng));
        f.detuning[2] = u(rng) - 1.5;
        f.detuning[3] = 4 * (u(rng) - 1.5);
        auto d = build_denominators(s, f);
        auto x = interference_factors(s, f, d);
        auto dr = population_differences(saturated_populations(s, x));
        cplx bare = s.width.lm * reduced_response_lm(x, dr) / (d.P(4) * dr[3]);
        cplx dressed = dressed_form_factor(s, f, 0.0);
        EXPECT_LT(std::abs(dressed - bare), 1e-8 * std::abs(bare));
    }
}

TEST(LocalField, OnePhotonPeakShiftsByDelta) {
    auto s = lambda_scheme();
    auto grid = linear_grid(-10, 10, 4001);
    for (double delta : {0.5, 1.0, 2.0}) {
        auto sp = dressed_probe_susceptibility(s, 0.0, 0.0, grid, config_for_shift(delta));
        auto p = global_peak(grid, sp.imag());
        EXPECT_NEAR(p.position, delta, grid[1] - grid[0]);
    }
}

TEST(LocalField, TwoPhotonFeatureIsUnshifted) {
    auto s = lambda_scheme(1e-3);
    const double omega3 = 0.7;
    auto grid = linear_grid(-10, 10, 4001);
    const double h = grid[1] - grid[0];
    for (double delta : {0.0, 1.0, 2.0}) {
        auto sp = dressed_probe_susceptibility(s, 0.5, omega3, grid, config_for_shift(delta));
        auto absorption = sp.imag();
        std::vector<double> neg(absorption.size());
        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -absorption[i];
        // the transparency dip is the deepest local minimum
        auto dips = find_peaks(grid, neg);
        ASSERT_FALSE(dips.empty());
        auto dip = *std::max_element(dips.begin(), dips.end(),
                                     [](const Peak& a, const Peak& b) { return a.value < b.value; });
        EXPECT_NEAR(dip.position, omega3, h) << "shift " << delta;
    }
}

TEST(LocalField, ShiftBreaksMirrorSymmetry) {
    auto s = lambda_scheme(0.1);
    FieldSet f;
    f.rabi[2] = 1.2;
    for (double w : {0.3, 1.0, 2.5}) {
        f.detuning[3] = w;
        cplx a = dressed_form_factor(s, f, 0.0);
        f.detuning[3] = -w;
        cplx b = dressed_form_factor(s, f, 0.0);
        EXPECT_LT(std::abs(a - std::conj(b)), 1e-14);
        f.detuning[3] = w;
        cplx c = dressed_form_factor(s, f, 1.5);
        f.detuning[3] = -w;
        cplx e = dressed_form_factor(s, f, 1.5);
        EXPECT_GT(std::abs(c - std::conj(e)), 1e-3);
    }
}

TEST(LocalField, FactorDeviationGrowsWithWidthRatio) {
    auto s = lambda_scheme(0.1);
    FieldSet f;
    f.rabi[2] = 0.8;
    f.detuning[2] = 0.2;
    EXPECT_EQ(local_field_factor(0.0, 2.0), cplx(1));
    for (double w : {-2.0, 0.0, 0.5, 3.0}) {
        f.detuning[3] = w;
        cplx f0 = dressed_form_factor(s, f, 0.0);
        cplx f2 = dressed_form_factor(s, f, 2.0 * s.width.lm);
        EXPECT_GT(std::abs(local_field_factor(f2, 2.0) - 1.0), std::abs(local_field_factor(f0, 0.0) - 1.0));
    }
}

TEST(LocalField, ContinuousInDensity) {
    auto s = lambda_scheme(0.1);
    auto grid = linear_grid(-5, 5, 101);
    LocalFieldConfig zero;
    auto a = dressed_probe_susceptibility(s, 0.9, 0.3, grid, zero);
    auto b = dressed_probe_susceptibility(s, 0.9, 0.3, grid, config_for_shift(1e-10));
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LT(std::abs(a.values()[i] - b.values()[i]), 1e-8);
}

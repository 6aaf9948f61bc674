#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "nief/collisional_na.hpp"

using namespace nief;
using namespace nief::sodium;

namespace {

// Rate equations solved directly as a 3x3 linear system in (r_n, r_g, r_m).
std::array<double, 3> direct_rates(const CollisionModel& m, double rabi_sq, double omega3) {
    const double p = 2 * rabi_sq * m.Gamma / (m.Gamma * m.Gamma + omega3 * omega3);
    Eigen::Matrix3d A;
    Eigen::Vector3d b(0, 0, m.N);
    // (Gamma_m + nu_mg) r_m - nu_gm r_g - p (r_n - r_m) = 0
    A.row(0) << -p, -m.nu_gm, m.gamma_m + m.nu_mg + p;
    // (Gamma_g + nu_gm) r_g - nu_mg r_m = 0
    A.row(1) << 0, m.gamma_g + m.nu_gm, -m.nu_mg;
    A.row(2) << 1, 1, 1;
    Eigen::Vector3d x = A.fullPivLu().solve(b);
    return {x(0), x(1), x(2)};
}

CollisionModel high_pressure() {
    CollisionModel m;
    m.buffer_pressure = 20 * units::atm;
    m.delta_E_per_cm = 60;
    return with_estimated_rates(m);
}

} // namespace

TEST(Sodium, UnpumpedLimitLeavesGroundFull) {
    auto m = sodium_helium_550K();
    auto r = populations(m, 0.0, 0.0);
    EXPECT_EQ(r.kappa, 0);
    EXPECT_DOUBLE_EQ(r.nm, m.N);
    EXPECT_DOUBLE_EQ(r.ng, m.N);
    EXPECT_DOUBLE_EQ(r.inversion, -m.N);
    EXPECT_DOUBLE_EQ(r.r_n, m.N);
    EXPECT_NEAR(r.r_g, 0, 1e-15);
    EXPECT_NEAR(r.r_m, 0, 1e-15);
}

TEST(Sodium, FullBranchMatchesDirectRateSolve) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (int k = 0; k < 50; ++k) {
        CollisionModel m;
        m.nu_mg = u(rng);
        m.nu_gm = u(rng);
        m.gamma_g = u(rng);
        m.gamma_m = u(rng);
        m.Gamma = u(rng);
        m.N = u(rng);
        double g2 = u(rng), o3 = u(rng) - 5;
        auto r = populations(m, std::sqrt(g2), o3);
        auto d = direct_rates(m, g2, o3);
        EXPECT_NEAR(r.r_n, d[0], 1e-12 * m.N);
        EXPECT_NEAR(r.r_g, d[1], 1e-12 * m.N);
        EXPECT_NEAR(r.r_m, d[2], 1e-12 * m.N);
    }
}

TEST(Sodium, BoltzmannBranchAgreesAtHighPressure) {
    auto m = high_pressure();
    ASSERT_GT((m.nu_mg - m.nu_gm) / m.gamma_g, 50);
    for (double kappa : {0.0, 1.0, 3.0, 10.0, 300.0, 3000.0}) {
        double g2 = rabi_sq_for_kappa(m, kappa, Branch::Simplified);
        auto a = populations(m, std::sqrt(g2), 0.0, Branch::Full);
        auto b = populations(m, std::sqrt(g2), 0.0, Branch::Simplified);
        EXPECT_NEAR(a.kappa, b.kappa, 0.01 * std::max(b.kappa, 1e-300));
        EXPECT_NEAR(a.nm, b.nm, 0.01 * std::abs(b.nm));
        EXPECT_NEAR(a.ng, b.ng, 0.01 * std::abs(b.ng));
    }
}

TEST(Sodium, SimplifiedBranchRejectsLowPressure) {
    auto m = sodium_helium_550K();
    m.nu_mg = 1e7;
    m.nu_gm = 0.9e7;
    try {
        populations(m, 1e9, 0.0, Branch::Simplified);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), NumericalError::Kind::RegimeViolation);
    }
}

TEST(Sodium, InversionRisesMonotonicallyAndCrossesZeroAtKappaStar) {
    auto m = sodium_helium_550K();
    double prev = -std::numeric_limits<double>::infinity();
    for (double kappa = 0; kappa < 2000; kappa += 5) {
        auto r = populations_from_kappa(m, kappa, Branch::Simplified);
        EXPECT_GT(r.inversion, prev);
        prev = r.inversion;
    }
    double ks = zero_inversion_kappa(m);
    EXPECT_NEAR(populations_from_kappa(m, ks, Branch::Simplified).ng, 0, 1e-15);
}

// Values computed with CODATA constants for the shipped preset.
TEST(Sodium, PresetDerivedQuantities) {
    auto e = estimate_rates(sodium_helium_550K());
    EXPECT_NEAR(e.boltzmann_exponent, 0.04500, 5e-5);
    EXPECT_NEAR(e.mean_speed, 1.849e5, 0.002e5);
    EXPECT_NEAR(e.buffer_density, 1.334e19, 0.002e19);
    EXPECT_NEAR(e.nu_mg / 1e9, 9.86, 0.02);
    EXPECT_NEAR(e.inversion_coefficient, 0.0151, 0.0001);
    EXPECT_NEAR(e.kappa_star, 66.2, 0.3);
    EXPECT_NEAR(e.kappa_per_intensity, 0.049, 0.001);
}

TEST(Sodium, StrongFieldNumbersForTenKilowattsPerSquareCentimetre) {
    auto m = sodium_helium_550K();
    const double intensity = 0.1 / 1e-5;
    const double g2 = rabi_sq_from_intensity(m, intensity);
    EXPECT_NEAR(std::sqrt(g2) / units::two_pi / 1e9, 3.6, 0.36);
    EXPECT_NEAR(saturation_parameter(m, g2, 0, Branch::Simplified), 5e2, 0.3 * 5e2);
}

TEST(Sodium, InversionlessGainEstimate) {
    CollisionModel m;
    m.Gamma_gm = 7.5e9;
    EXPECT_NEAR(inversionless_gain_estimate(m), -2.8e-3, 0.2 * 2.8e-3);
    m.Gamma_gm = 1e30;
    EXPECT_NEAR(inversionless_gain_estimate(m), 0, 1e-20);
}

TEST(Sodium, FullResponseAtZeroInversionNearEstimate) {
    auto m = sodium_helium_550K();
    double ks = zero_inversion_kappa(m, Branch::Full);
    double full = line_center_response(m, ks, Branch::Full);
    double est = inversionless_gain_estimate(m);
    EXPECT_LT(full, 0);
    EXPECT_GT(full / est, 0.5);
    EXPECT_LT(full / est, 2.0);
}

namespace {

double amplification_at_zero_inversion(double splitting) {
    CollisionModel m;
    m.delta_E_per_cm = splitting;
    m = with_estimated_rates(m);
    return -line_center_response(m, zero_inversion_kappa(m, Branch::Full), Branch::Full);
}

} // namespace

TEST(Sodium, AmplificationAtZeroInversionGrowsWithSplitting) {
    double h = 1e-3;
    EXPECT_GT(amplification_at_zero_inversion(17.2 + h), amplification_at_zero_inversion(17.2 - h));
    double prev = 0;
    for (double dE : {17.2, 30.0, 57.7, 100.0}) {
        double amp = amplification_at_zero_inversion(dE);
        EXPECT_GT(amp, prev) << "splitting " << dE;
        prev = amp;
    }
}

TEST(Sodium, VSchemeAdapterUsesCollisionalPopulations) {
    auto m = sodium_helium_550K();
    auto model = population_model(m);
    double g2 = rabi_sq_for_kappa(m, 40);
    auto p = model(g2, 0);
    auto r = populations(m, std::sqrt(g2), 0);
    EXPECT_DOUBLE_EQ(p.n - p.g, r.ng);
    EXPECT_DOUBLE_EQ(p.reference, m.N);
}

#include <gtest/gtest.h>

#include <random>

#include "nief/interference_relax.hpp"

using namespace nief;
using namespace nief::relax;

TEST(Doublet, ResonanceVanishesForSpontaneousWidthsAndStableGround) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> det(-50, 50), rate(0.01, 10);
    for (int k = 0; k < 1000; ++k) {
        auto c = spontaneous_only({rate(rng), rate(rng), 0}, det(rng), det(rng), det(rng));
        EXPECT_LT(resonance_contrast(c), 1e-12);
        EXPECT_LT(std::abs(doublet_bracket(c) - 1.0), 1e-12);
    }
}

TEST(Doublet, DecayingLowerLevelLeavesResidualResonance) {
    auto c = spontaneous_only({1, 2, 0.5});
    // excess width is -Gamma_g
    EXPECT_NEAR(resonance_contrast(c), 0.5 / c.gamma_nnp, 1e-15);
}

TEST(Doublet, CollisionsSwitchOnALorentzian) {
    auto base = spontaneous_only({1.0, 3.0, 0});
    auto c = with_collisions(base, base.gamma_nnp);
    EXPECT_NEAR(resonance_contrast(c), 0.5, 1e-9);
    // Lorentzian of width Gamma_nn' in O: |bracket - 1| halves its square at O = Gamma_nn'
    c.O = c.gamma_nnp;
    EXPECT_NEAR(std::norm(doublet_bracket(c) - 1.0), 0.5 * 0.25, 1e-12);
    c.O = 1e12;
    EXPECT_NEAR(std::abs(doublet_bracket(c) - 1.0), 0, 1e-9);
}

TEST(Doublet, ContrastGrowsWithCollisionalWidth) {
    auto base = spontaneous_only({0.7, 1.3, 0});
    double prev = resonance_contrast(base);
    for (double d = 0.1; d < 20; d *= 1.5) {
        double c = resonance_contrast(with_collisions(base, d));
        EXPECT_GT(c, prev);
        EXPECT_NEAR(c, d / (base.gamma_nnp + d), 1e-12);
        prev = c;
    }
}

TEST(Doublet, ContrastIsScaleInvariant) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int k = 0; k < 200; ++k) {
        DoubletConfig c{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const double s = u(rng) * 100;
        DoubletConfig sc{s * c.O1, s * c.O2, s * c.O, s * c.gamma_ng, s * c.gamma_npg, s * c.gamma_nnp};
        EXPECT_NEAR(resonance_contrast(c), resonance_contrast(sc), 1e-12 * (1 + resonance_contrast(c)));
        EXPECT_LT(std::abs(doublet_bracket(c) - doublet_bracket(sc)), 1e-12);
    }
}

TEST(Doublet, CoherenceFactorizes) {
    DoubletConfig c{0.3, -0.4, 0.2, 1.1, 0.9, 2.5};
    cplx expected = doublet_bracket(c) / ((c.O2 + I * c.gamma_npg) * (c.O1 - I * c.gamma_ng));
    EXPECT_LT(std::abs(doublet_coherence(c) - expected), 1e-15);
    auto mags = bracket_magnitude(c, {-1, 0, 1});
    EXPECT_EQ(mags.size(), 3u);
    c.gamma_nnp = 0;
    EXPECT_THROW(doublet_bracket(c), ValidationError);
}

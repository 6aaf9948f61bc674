#include <gtest/gtest.h>

#include "nief/steady_state.hpp"
#include "support/random_scheme.hpp"

using namespace nief;
using nief::fixtures::rel_dev;

namespace {

double max_deviation(const SteadyState& a, const SteadyState& b) {
    double m = 0;
    m = std::max(m, rel_dev(a.pop.l, b.pop.l));
    m = std::max(m, rel_dev(a.pop.g, b.pop.g));
    m = std::max(m, rel_dev(a.pop.n, b.pop.n));
    m = std::max(m, rel_dev(a.pop.m, b.pop.m));
    for (int i = 0; i < 4; ++i) m = std::max(m, rel_dev(a.coherence[i], b.coherence[i]));
    m = std::max(m, rel_dev(a.mixing_ng, b.mixing_ng));
    m = std::max(m, rel_dev(a.mixing_lm, b.mixing_lm));
    return m;
}

} // namespace

TEST(ClosedForm, AgreesWithOracleOnRandomDraws) {
    fixtures::SchemeSampler rnd(2024);
    double worst = 0;
    for (int k = 0; k < 300; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        worst = std::max(worst, max_deviation(solve_closed_form(s, f), oracle_solve(s, f)));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(ClosedForm, CascadeVariantAgreesWithOracle) {
    fixtures::SchemeSampler rnd(77);
    for (int k = 0; k < 40; ++k) {
        auto s = rnd.scheme();
        s.detuning_sign = {1, -1, 1, -1};
        auto f = rnd.fields(s);
        EXPECT_LT(max_deviation(solve_closed_form(s, f), oracle_solve(s, f)), 1e-9);
    }
}

TEST(ClosedForm, DifferencesAreExact) {
    fixtures::SchemeSampler rnd(5);
    auto s = rnd.scheme();
    auto st = solve_closed_form(s, rnd.fields(s));
    EXPECT_EQ(st.pop_diff[0], st.pop.l - st.pop.g);
    EXPECT_EQ(st.pop_diff[1], st.pop.n - st.pop.g);
    EXPECT_EQ(st.pop_diff[2], st.pop.n - st.pop.m);
    EXPECT_EQ(st.pop_diff[3], st.pop.l - st.pop.m);
}

TEST(ClosedForm, LambdaVReductionAtZeroField3) {
    fixtures::SchemeSampler rnd(99);
    for (int k = 0; k < 50; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        f.rabi[2] = 0;
        auto d = build_denominators(s, f);
        auto x = interference_factors(s, f, d);
        auto st = solve_closed_form(s, f);
        cplx r2 = I * f.rabi[1] / d.P(2) * lambda_v_response_ng(x, st.pop_diff);
        cplx r4 = I * f.rabi[3] / d.P(4) * lambda_v_response_lm(x, st.pop_diff);
        EXPECT_LT(rel_dev(st.coherence[1], r2), 1e-12);
        EXPECT_LT(rel_dev(st.coherence[3], r4), 1e-12);
    }
}

TEST(ClosedForm, BareLorentzianWithoutStrongFields) {
    LevelScheme s;
    s.pump = {0.1, 0.2, 0.9, 0.3};
    FieldSet f;
    f.rabi[1] = cplx(1e-3, 2e-4);
    f.detuning[1] = 0.8;
    auto st = solve_closed_form(s, f);
    auto n = s.unperturbed();
    cplx expect = I * f.rabi[1] * (n.n - n.g) / cplx(s.width.ng, 0.8);
    EXPECT_LT(rel_dev(st.coherence[1], expect), 1e-14);
}

TEST(ClosedForm, PopulationConservedInClosedScheme) {
    auto s = fixtures::closed_scheme(1.0);
    const double total = (s.pump.l + s.pump.g + s.pump.n + s.pump.m) / 1.0;
    fixtures::SchemeSampler rnd(8);
    for (int k = 0; k < 30; ++k) {
        auto f = rnd.fields(s);
        auto st = solve_closed_form(s, f);
        EXPECT_NEAR(st.pop.total(), total, 1e-10 * total);
    }
}

TEST(ClosedForm, SaturationMonotoneInField1) {
    fixtures::SchemeSampler rnd(31);
    for (int k = 0; k < 20; ++k) {
        auto s = rnd.scheme();
        FieldSet f;
        double prev = 0;
        for (int j = 0; j <= 40; ++j) {
            f.rabi[0] = 0.25 * j * s.width.lg;
            double dr1 = solve_closed_form(s, f).pop_diff[0];
            if (j > 0) { EXPECT_LE(std::abs(dr1), std::abs(prev) * (1 + 1e-13)); }
            if (j > 0 && prev != 0) { EXPECT_GE(dr1 * prev, 0.0); }
            prev = dr1;
        }
    }
}

TEST(ClosedForm, RejectsStrongProbe) {
    LevelScheme s;
    FieldSet f;
    f.rabi[1] = 0.5;
    EXPECT_THROW(solve_closed_form(s, f), ValidationError);
}

TEST(Oracle, PopulationsStationaryUnderRateEquations) {
    fixtures::SchemeSampler rnd(41);
    auto s = rnd.scheme();
    auto f = rnd.fields(s);
    auto st = oracle_solve(s, f);
    const auto& D = s.decay;
    const auto& B = s.branch;
    double w1 = 2 * std::real(I * std::conj(f.rabi[0]) * st.coherence[0]);
    double w3 = 2 * std::real(I * std::conj(f.rabi[2]) * st.coherence[2]);
    EXPECT_NEAR(D.g * st.pop.g + w1 - s.pump.g, 0, 1e-12);
    EXPECT_NEAR(D.m * st.pop.m + w3 - s.pump.m, 0, 1e-12);
    EXPECT_NEAR(D.l * st.pop.l - w1 - B.gl * st.pop.g - B.ml * st.pop.m - s.pump.l, 0, 1e-12);
    EXPECT_NEAR(D.n * st.pop.n - w3 - B.gn * st.pop.g - B.mn * st.pop.m - s.pump.n, 0, 1e-12);
}

TEST(Oracle, DetuningFlipConjugatesCoherences) {
    // Real Rabi frequencies: odd-order amplitudes map to minus their conjugate.
    fixtures::SchemeSampler rnd(43);
    for (int k = 0; k < 20; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        for (auto& g : f.rabi) g = std::abs(g);
        auto a = oracle_solve(s, f);
        auto flipped = f;
        for (auto& o : flipped.detuning) o = -o;
        auto b = oracle_solve(s, flipped);
        EXPECT_NEAR(a.pop.l, b.pop.l, 1e-12);
        EXPECT_NEAR(a.pop.n, b.pop.n, 1e-12);
        for (int i = 0; i < 4; ++i) EXPECT_LT(rel_dev(a.coherence[i], -std::conj(b.coherence[i])), 1e-10);
        EXPECT_LT(rel_dev(a.mixing_lm, -std::conj(b.mixing_lm)), 1e-10);
        EXPECT_LT(rel_dev(a.mixing_ng, -std::conj(b.mixing_ng)), 1e-10);
    }
}

TEST(TwoStrong, WeakField4LimitIsWeakProbeResponse) {
    fixtures::SchemeSampler rnd(51);
    for (int k = 0; k < 20; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        f.rabi[0] = 0;
        f.rabi[1] = 0;
        f.rabi[3] = 1e-7;
        const double dr3 = 0.3, dr4 = 0.7;
        auto r = solve_two_strong(s, f, dr3, dr4);
        auto d = build_denominators(s, f);
        auto x = interference_factors(s, f, d);
        std::array<double, 4> dr{0, 0, dr3, dr4};
        cplx weak = I * f.rabi[3] / d.P(4) * reduced_response_lm(x, dr);
        EXPECT_LT(rel_dev(r.lm, weak), 1e-8);
    }
}

TEST(TwoStrong, NoField3GivesBareResponse) {
    LevelScheme s;
    FieldSet f;
    f.rabi[3] = 1e-6;
    f.detuning[3] = 0.4;
    auto r = solve_two_strong(s, f, 0.1, 0.6);
    EXPECT_LT(rel_dev(r.lm, I * f.rabi[3] * 0.6 / cplx(s.width.lm, 0.4)), 1e-10);
}

TEST(TwoStrong, AgreesWithDirectCoherenceSolve) {
    fixtures::SchemeSampler rnd(61);
    for (int k = 0; k < 30; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        f.rabi[0] = f.rabi[1] = 0;
        f.rabi[3] = rnd.phase(3 * rnd.unit() * s.width.lm);
        auto sc = solve_two_strong_self_consistent(s, f);
        auto ref = oracle_two_strong(s, f);
        EXPECT_LT(rel_dev(sc.coherence.nm, ref.coherence.nm), 1e-8);
        EXPECT_LT(rel_dev(sc.coherence.lm, ref.coherence.lm), 1e-8);
        EXPECT_NEAR(sc.pop.l, ref.pop.l, 1e-9);
        EXPECT_NEAR(sc.pop.m, ref.pop.m, 1e-9);
    }
}

TEST(TwoStrong, SwappingFields3And4ExchangesCoherences) {
    fixtures::SchemeSampler rnd(71);
    for (int k = 0; k < 20; ++k) {
        auto s = rnd.scheme();
        auto f = rnd.fields(s);
        f.rabi[3] = rnd.phase(2 * s.width.lm);
        const double dr3 = rnd.sym(1), dr4 = rnd.sym(1);
        auto a = solve_two_strong(s, f, dr3, dr4);

        auto s2 = s;
        std::swap(s2.width.nm, s2.width.lm);
        auto f2 = f;
        std::swap(f2.rabi[2], f2.rabi[3]);
        std::swap(f2.detuning[2], f2.detuning[3]);
        auto b = solve_two_strong(s2, f2, dr4, dr3);
        EXPECT_LT(rel_dev(b.nm, a.lm), 1e-12);
        EXPECT_LT(rel_dev(b.lm, a.nm), 1e-12);
    }
}

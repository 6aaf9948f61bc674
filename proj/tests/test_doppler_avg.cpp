#include <gtest/gtest.h>

#include <chrono>

#include "nief/doppler_avg.hpp"

using namespace nief;
using namespace nief::doppler;

namespace {

LevelScheme uniform_widths(double g = 1) {
    LevelScheme s;
    s.width = {g, g, g, g, g, g};
    return s;
}

// Only the n_g - n_n terms are fed: N_g = N_l, N_n = N_m.
DopplerConfig gas(double ku) {
    DopplerConfig c;
    c.k = {1.05, 1.0, 1.1};
    c.u = ku;
    c.N_g = 1;
    c.N_l = 1;
    c.N_n = 0;
    c.N_m = 0;
    return c;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
    ma /= a.size();
    mb /= b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST(GaussHermite, IntegratesGaussianMoments) {
    for (int n : {64, 512, 4096}) {
        const auto& q = quad::gauss_hermite(n);
        double m0 = 0, m2 = 0, m4 = 0;
        for (int i = 0; i < n; ++i) {
            double x = q.nodes[i];
            m0 += q.weights[i];
            m2 += q.weights[i] * x * x;
            m4 += q.weights[i] * x * x * x * x;
        }
        const double sp = std::sqrt(std::numbers::pi);
        EXPECT_NEAR(m0, sp, 1e-12) << n;
        EXPECT_NEAR(m2, sp / 2, 1e-12) << n;
        EXPECT_NEAR(m4, 3 * sp / 4, 1e-11) << n;
    }
}

TEST(Chi3, StationaryResonantValueScalesAsInverseCube) {
    Detunings d;
    DopplerConfig c;
    VelocityPopulations p{1, 0, 0.3, 0.2};
    cplx a = chi3_velocity(uniform_widths(1), d, c, p, 0);
    cplx b = chi3_velocity(uniform_widths(2), d, c, p, 0);
    EXPECT_NEAR(std::abs(a / b), 8, 1e-12);
}

TEST(Chi3, OnlyGroundDifferenceKeepsTwoTerms) {
    auto D = chi3_denominators(uniform_widths(), {0.3, -0.2, 0.5}, DopplerConfig{});
    auto t = chi3_terms(D, {1, 0, 1, 0}, 0.7);
    EXPECT_NE(t.gn_gm, cplx(0));
    EXPECT_NE(t.gn_ln, cplx(0));
    EXPECT_EQ(t.mn_gm, cplx(0));
    EXPECT_EQ(t.gl_ln, cplx(0));
}

TEST(Chi3, PoleHalfPlanes) {
    auto s = uniform_widths();
    Detunings d{0.4, -0.3, 0.2};
    auto c = gas(50);
    for (const auto& a : audit_poles(s, d, c)) {
        bool ground = a.term == "gn_gm" || a.term == "gn_ln";
        EXPECT_EQ(a.upper && a.lower, ground) << a.term;
    }
    c.scheme = MixingScheme::Sum;
    for (const auto& a : audit_poles(s, d, c)) EXPECT_FALSE(a.upper && a.lower) << a.term;
}

TEST(Average, ClosedFormWithinFivePercentAtHundred) {
    auto s = uniform_widths();
    auto r = chi3_averaged(s, {}, gas(100));
    EXPECT_LT(std::abs(r.numeric.value - r.closed) / std::abs(r.closed), 0.05);
    EXPECT_LE(r.numeric.last_change, 1e-4);
}

TEST(Average, ClosedFormApproachesNumericMonotonically) {
    auto s = uniform_widths();
    double prev = std::numeric_limits<double>::infinity();
    for (double ku : {10.0, 30.0, 100.0, 300.0}) {
        auto r = chi3_averaged(s, {0.0, 0.5, 0.0}, gas(ku));
        double err = std::abs(r.numeric.value - r.closed) / std::abs(r.closed);
        EXPECT_LT(err, prev) << ku;
        prev = err;
    }
}

TEST(Average, SumSchemeSuppressed) {
    auto s = uniform_widths();
    auto c = gas(100);
    cplx diff = chi3_average_numeric(s, {}, c).value;
    c.scheme = MixingScheme::Sum;
    cplx sum = chi3_average_numeric(s, {}, c).value;
    EXPECT_GE(std::abs(diff) / std::abs(sum), 10);
    // of order (ku/Gamma)^2
    EXPECT_GT(std::abs(diff) / std::abs(sum), 1e3);
}

TEST(Average, QuadratureRoutesAgree) {
    auto s = uniform_widths();
    for (double ku : {0.5, 1.0, 2.0}) {
        auto c = gas(ku);
        auto h = chi3_average_numeric(s, {0.2, -0.1, 0.3}, c);
        ASSERT_EQ(h.method, Method::GaussHermite);
        c.allow_hermite = false;
        auto l = chi3_average_numeric(s, {0.2, -0.1, 0.3}, c);
        ASSERT_EQ(l.method, Method::GradedLegendre);
        EXPECT_LT(std::abs(h.value - l.value), 1e-4 * std::abs(l.value)) << ku;
    }
}

TEST(Average, ProfileHookReproducesFactorizedPopulations) {
    auto s = uniform_widths();
    auto c = gas(20);
    auto base = chi3_average_numeric(s, {0.1, 0.2, -0.3}, c);
    auto hooked = chi3_average_numeric(s, {0.1, 0.2, -0.3}, c, [&](double v) {
        double w = maxwell(v, c.u);
        return VelocityPopulations{c.N_g * w, c.N_n * w, c.N_l * w, c.N_m * w};
    });
    EXPECT_LT(std::abs(base.value - hooked.value), 1e-10 * std::abs(base.value));
}

TEST(Average, EqualWavenumbersGiveBareWidths) {
    auto s = uniform_widths();
    s.width.ln = 0.7;
    s.width.gm = 1.3;
    DopplerConfig c;
    c.k = {2, 2, 2};
    auto t = closed_form_terms(s, {}, c);
    EXPECT_DOUBLE_EQ(t.gamma1, s.width.ln);
    EXPECT_DOUBLE_EQ(t.gamma3, s.width.gm);
}

TEST(Average, PeakSitsAtWavenumberScaledDetuning) {
    auto s = uniform_widths();
    auto c = gas(100);
    const double O2 = 20, O3 = c.k[2] * O2 / c.k[1];
    double best = 0, best_O1 = 0;
    const double target = c.k[0] * O2 / c.k[1];
    const double h = 0.02;
    for (int i = -200; i <= 200; ++i) {
        double O1 = target + i * h;
        double m = std::abs(chi3_average_numeric(s, {O1, O2, O3}, c).value);
        if (m > best) best = m, best_O1 = O1;
    }
    EXPECT_NEAR(best_O1, target, h);
}

TEST(Average, ScanRunsQuickly) {
    auto s = uniform_widths();
    auto c = gas(100);
    auto t0 = std::chrono::steady_clock::now();
    for (int i = -500; i <= 500; ++i) chi3_averaged(s, {0.1 * i, 0.0, 0.0}, c);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 10);
}

TEST(Raman, GaussianShapeOfTheFarDetunedAverage) {
    LevelScheme s = uniform_widths();
    DopplerConfig c;
    c.k = {1.0, 0.8, 1.0};
    c.u = 100;
    c.N_g = 1;
    c.N_n = 1;
    c.N_m = 1;
    c.N_l = 0;
    const double O1 = 3000, O3 = 3000;
    std::vector<double> num, model;
    for (int i = -60; i <= 60; ++i) {
        double O2 = O1 + i;
        double O4 = O1 - O2 + O3;
        cplx avg = chi3_average_numeric(s, {O1, O2, O3}, c).value;
        num.push_back((I * avg * O1 * O4).real());
        model.push_back(raman_limit(O1, O2, O4, c).real() * O1 * O4);
    }
    EXPECT_GT(pearson(num, model), 0.99);
    EXPECT_DOUBLE_EQ(raman_limit(5, 5, 7, c).real(), 1.0 / 35);
}

TEST(Raman, ResidualWidthCollapsesAndDegenerates) {
    DopplerConfig c;
    c.u = 1;
    c.k = {1.0, 0.999, 1.0};
    double narrow = raman_limit(10, 10.01, 5, c).real() * 50;
    c.k = {1.0, 0.9, 1.0};
    double wide = raman_limit(10, 10.01, 5, c).real() * 50;
    EXPECT_LT(narrow, wide);
    c.k = {1.0, 1.0, 1.0};
    try {
        raman_limit(10, 10, 5, c);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.kind(), NumericalError::Kind::DegenerateGeometry);
    }
    EXPECT_DOUBLE_EQ(nonresonant_limit(2, 1, 4).real(), 1.0 / 8);
}

TEST(Average, RejectsBadConfig) {
    auto c = gas(1);
    c.span = 5;
    EXPECT_THROW(chi3_average_numeric(uniform_widths(), {}, c), ValidationError);
    c = gas(1);
    c.k[1] = 0;
    EXPECT_THROW(chi3_average_numeric(uniform_widths(), {}, c), ValidationError);
}

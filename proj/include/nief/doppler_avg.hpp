#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nief/core_scheme.hpp"
#include "nief/quadrature.hpp"

namespace nief::doppler {

// Third-order mixing at w4 = w1 - w2 + w3 in a Maxwell gas.
enum class MixingScheme { Difference, Sum };

struct DopplerConfig {
    double u = 1;                     // most probable thermal speed
    std::array<double, 3> k{1, 1, 1}; // k1, k2, k3
    std::array<int, 3> direction{1, 1, 1};
    MixingScheme scheme = MixingScheme::Difference;
    // Velocity-integrated unperturbed populations.
    double N_g = 1, N_n = 0, N_l = 0, N_m = 0;
    double span = 7;   // velocity range +-span*u
    double tol = 1e-4; // node-doubling tolerance
    int hermite_start = 64, hermite_cap = 4096;
    int max_doublings = 8;
    bool allow_hermite = true;
};

inline void validate(const DopplerConfig& c) {
    if (!(c.u > 0)) throw ValidationError("u: thermal speed must be positive");
    for (int i = 0; i < 3; ++i) {
        if (!(c.k[i] > 0)) throw ValidationError("k" + std::to_string(i + 1) + ": must be positive");
        if (c.direction[i] != 1 && c.direction[i] != -1)
            throw ValidationError("direction: must be +1 or -1");
    }
    if (!(c.span >= 6)) throw ValidationError("span: velocity grid must cover at least 6u");
}

struct Detunings {
    double O1 = 0, O2 = 0, O3 = 0;
};

struct VelocityPopulations {
    double g = 0, n = 0, l = 0, m = 0;
};

// Velocity-linear detuning b - c v.
struct Lin {
    double b = 0, c = 0;
    double at(double v) const { return b - c * v; }
};
inline Lin operator+(Lin x, Lin y) { return {x.b + y.b, x.c + y.c}; }
inline Lin operator-(Lin x, Lin y) { return {x.b - y.b, x.c - y.c}; }
inline Lin operator-(Lin x) { return {-x.b, -x.c}; }

// width + i * detuning(v)
struct LinearDenominator {
    double width;
    Lin detuning;
    std::string label;

    cplx at(double v) const { return {width, detuning.at(v)}; }
    bool has_pole() const { return detuning.c != 0; }
    // Complex velocity where the denominator vanishes.
    cplx pole() const { return cplx(detuning.b, -width) / detuning.c; }
};

struct Chi3Denominators {
    LinearDenominator mix;   // Gamma_ml + i(O1' - O2' + O3')
    LinearDenominator gm;    // Gamma_gm + i(O3' - O2')
    LinearDenominator ng;    // Gamma_ng - i O2'
    LinearDenominator mn;    // Gamma_mn + i O3'
    LinearDenominator ln;    // Gamma_ln + i(O1' - O2')
    LinearDenominator lg;    // Gamma_lg + i O1'
};

inline Chi3Denominators chi3_denominators(const LevelScheme& s, const Detunings& d, const DopplerConfig& c) {
    Lin o1{d.O1, c.direction[0] * c.k[0]};
    Lin o2{d.O2, c.direction[1] * c.k[1]};
    Lin o3{d.O3, c.direction[2] * c.k[2]};
    // The cascade (sum) configuration enters through O2' -> -O2'.
    if (c.scheme == MixingScheme::Sum) o2 = -o2;
    const auto& w = s.width;
    return {{w.lm, o1 - o2 + o3, "ml"}, {w.gm, o3 - o2, "gm"}, {w.ng, -o2, "ng"},
            {w.nm, o3, "mn"},           {w.ln, o1 - o2, "ln"}, {w.lg, o1, "lg"}};
}

// The four population terms of the bracket, each with its full prefactor.
struct Chi3Terms {
    cplx gn_gm, mn_gm, gn_ln, gl_ln;
    cplx total() const { return gn_gm + mn_gm + gn_ln + gl_ln; }
};

inline Chi3Terms chi3_terms(const Chi3Denominators& D, const VelocityPopulations& p, double v) {
    const cplx pre = I / D.mix.at(v);
    const cplx a = pre / D.gm.at(v), b = pre / D.ln.at(v);
    const cplx ng = 1.0 / D.ng.at(v);
    return {a * (p.g - p.n) * ng, a * (p.m - p.n) / D.mn.at(v), b * (p.g - p.n) * ng,
            b * (p.g - p.l) / D.lg.at(v)};
}

// Velocity-resolved susceptibility with K = 1.
inline cplx chi3_velocity(const LevelScheme& s, const Detunings& d, const DopplerConfig& c,
                          const VelocityPopulations& p, double v) {
    return chi3_terms(chi3_denominators(s, d, c), p, v).total();
}

struct PoleAudit {
    std::string term;
    bool upper = false, lower = false;
};

// Half-planes of complex velocity holding the poles of each population term.
inline std::vector<PoleAudit> audit_poles(const LevelScheme& s, const Detunings& d, const DopplerConfig& c) {
    auto D = chi3_denominators(s, d, c);
    auto mark = [](PoleAudit& a, const LinearDenominator& x) {
        if (!x.has_pole()) return;
        (x.pole().imag() > 0 ? a.upper : a.lower) = true;
    };
    std::vector<PoleAudit> out{{"gn_gm"}, {"mn_gm"}, {"gn_ln"}, {"gl_ln"}};
    const LinearDenominator* terms[4][3] = {
        {&D.mix, &D.gm, &D.ng}, {&D.mix, &D.gm, &D.mn}, {&D.mix, &D.ln, &D.ng}, {&D.mix, &D.ln, &D.lg}};
    for (int t = 0; t < 4; ++t)
        for (auto* x : terms[t]) mark(out[t], *x);
    return out;
}

inline double maxwell(double v, double u) {
    return std::exp(-(v * v) / (u * u)) / (std::sqrt(std::numbers::pi) * u);
}

enum class Method { GaussHermite, GradedLegendre };

struct AverageResult {
    cplx value;
    int nodes = 0;
    Method method = Method::GradedLegendre;
    double last_change = 0; // relative change at the final doubling
};

// Optional velocity-resolved populations (already including the velocity
// distribution). Without it populations factorize as N_i W(v).
using PopulationProfile = std::function<VelocityPopulations(double)>;

namespace detail {

inline std::vector<quad::Feature> pole_features(const Chi3Denominators& D) {
    std::vector<quad::Feature> f;
    for (auto* x : {&D.mix, &D.gm, &D.ng, &D.mn, &D.ln, &D.lg})
        if (x->has_pole()) f.push_back({x->pole().real(), std::abs(x->pole().imag())});
    return f;
}

inline double narrowest(const std::vector<quad::Feature>& f) {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& x : f) w = std::min(w, x.width);
    return w;
}

} // namespace detail

inline AverageResult chi3_average_numeric(const LevelScheme& s, const Detunings& d, const DopplerConfig& c,
                                          const PopulationProfile& profile = {}) {
    validate(c);
    require_valid(s);
    const auto D = chi3_denominators(s, d, c);
    const auto features = detail::pole_features(D);
    const VelocityPopulations N{c.N_g, c.N_n, c.N_l, c.N_m};
    auto integrand = [&](double v) -> cplx {
        if (profile) return chi3_terms(D, profile(v), v).total();
        return chi3_terms(D, N, v).total() * maxwell(v, c.u);
    };

    AverageResult r;
    const bool hermite_ok = c.allow_hermite && !profile && quad::gauss_hermite_spacing(c.hermite_cap) * c.u <
                                            0.25 * detail::narrowest(features);
    if (hermite_ok) {
        r.method = Method::GaussHermite;
        auto rule_sum = [&](int n) {
            const auto& q = quad::gauss_hermite(n);
            cplx acc = 0;
            for (int i = 0; i < n; ++i)
                if (q.weights[i] > 0)
                    acc += q.weights[i] * chi3_terms(D, N, c.u * q.nodes[i]).total();
            return acc / std::sqrt(std::numbers::pi);
        };
        cplx prev = rule_sum(c.hermite_start);
        for (int n = 2 * c.hermite_start; n <= c.hermite_cap; n *= 2) {
            cplx cur = rule_sum(n);
            r.last_change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
            r.value = cur;
            r.nodes = n;
            if (r.last_change <= c.tol) return r;
            prev = cur;
        }
        fail(NumericalError::Kind::QuadratureNotConverged, "Gauss-Hermite node doubling did not settle");
    }

    r.method = Method::GradedLegendre;
    const double L = c.span * c.u;
    const auto breaks = quad::graded_breaks(-L, L, features, 0.25 * c.u);
    const int panels = int(breaks.size()) - 1;
    cplx prev = quad::composite_legendre(integrand, breaks, 1);
    for (int split = 2, level = 0; level < c.max_doublings; split *= 2, ++level) {
        cplx cur = quad::composite_legendre(integrand, breaks, split);
        r.last_change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        r.value = cur;
        r.nodes = panels * split * quad::legendre_order;
        if (r.last_change <= c.tol) return r;
        prev = cur;
    }
    fail(NumericalError::Kind::QuadratureNotConverged, "panel doubling did not settle");
}

// Large-ku residue at the n-g pole, K = 1:
//   2 sqrt(pi)/(k2 u) exp(-(O2/k2u)^2) i (N_g - N_n) (1/D)(1/A1 + 1/A3)
// which becomes i 2 sqrt(pi) .../(k2 u A1 A3) when Gamma_ml + Gamma_ng = Gamma_ln + Gamma_gm.
struct ClosedFormTerms {
    cplx A1, A3, D;
    double gamma1, gamma3;
};

inline ClosedFormTerms closed_form_terms(const LevelScheme& s, const Detunings& d, const DopplerConfig& c) {
    const double k1 = c.direction[0] * c.k[0], k2 = c.direction[1] * c.k[1], k3 = c.direction[2] * c.k[2];
    const auto& w = s.width;
    ClosedFormTerms t;
    t.gamma1 = w.ln + (k1 / k2 - 1) * w.ng;
    t.gamma3 = w.gm + (k3 / k2 - 1) * w.ng;
    const double d1 = d.O1 - k1 * d.O2 / k2, d3 = d.O3 - k3 * d.O2 / k2;
    t.A1 = cplx(t.gamma1, d1);
    t.A3 = cplx(t.gamma3, d3);
    t.D = cplx(w.lm + (k1 / k2 + k3 / k2 - 1) * w.ng, d1 + d3);
    return t;
}

inline bool product_form_applies(const LevelScheme& s, double rel = 1e-12) {
    const auto& w = s.width;
    return std::abs(w.lm + w.ng - w.ln - w.gm) <= rel * (w.lm + w.ng);
}

inline cplx chi3_average_closed(const LevelScheme& s, const Detunings& d, const DopplerConfig& c) {
    validate(c);
    if (c.scheme != MixingScheme::Difference)
        throw ValidationError("scheme: the closed form covers the difference scheme only");
    const auto t = closed_form_terms(s, d, c);
    const double k2u = c.k[1] * c.u;
    const double pre = 2 * std::sqrt(std::numbers::pi) / k2u * std::exp(-std::pow(d.O2 / k2u, 2));
    return pre * I * (c.N_g - c.N_n) / t.D * (1.0 / t.A1 + 1.0 / t.A3);
}

struct AveragedChi3 {
    AverageResult numeric;
    cplx closed;
};

inline AveragedChi3 chi3_averaged(const LevelScheme& s, const Detunings& d, const DopplerConfig& c) {
    AveragedChi3 r;
    r.numeric = chi3_average_numeric(s, d, c);
    r.closed = c.scheme == MixingScheme::Difference ? chi3_average_closed(s, d, c) : cplx(0);
    return r;
}

// Single Raman-type resonance w1 - w2 ~ w_ln, one-photon detunings large:
//   chi ~ exp(-((O1 - O2)/((k1 - k2) u))^2) / (O1 O4)
inline cplx raman_limit(double O1, double O2, double O4, const DopplerConfig& c) {
    const double dk = c.direction[0] * c.k[0] - c.direction[1] * c.k[1];
    if (std::abs(dk) <= 1e-12 * std::max(c.k[0], c.k[1]))
        fail(NumericalError::Kind::DegenerateGeometry, "k1 = k2: residual Doppler width vanishes");
    return std::exp(-std::pow((O1 - O2) / (dk * c.u), 2)) / (O1 * O4);
}

// No resonance at all.
inline cplx nonresonant_limit(double O1, double O2, double O4) { return 1.0 / (O1 * O4 * (O1 - O2)); }

} // namespace nief::doppler

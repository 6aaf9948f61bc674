#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nief/core_scheme.hpp"

namespace nief::fwm {

// Ladder 0-1-2-3 with weak fields at w1 (0-1) and ws (0-3) and strong fields
// at w2 (1-2) and w3 (2-3). Detunings are normalized to the halfwidths.
struct MixingConfig {
    double g2 = 0, g3 = 0;
    double x1 = 0, x02 = 0, xs = 0; // chain driven at w1
    double y1 = 0, y02 = 0, ys = 0; // chain driven at ws
    cplx chi1_0{0, 1}, chis_0{0, 1}, chiNL_0{0, 1};

    // ws = w1 + w2 + w3: both chains see the same denominators.
    void enforce_sum_frequency() {
        y1 = x1;
        y02 = x02;
        ys = xs;
    }
};

inline double saturation(cplx G, double width_a, double width_b) {
    if (!(width_a > 0) || !(width_b > 0)) throw ValidationError("widths: zero coherence width");
    return std::norm(G) / (width_a * width_b);
}

struct Transitions {
    double w10 = 0, w20 = 0, w30 = 0;
    double gamma10 = 1, gamma20 = 1, gamma30 = 1;
};

// Normalized configuration from absolute frequencies (rad/s). A negative ws
// means "generated wave": ws = w1 + w2 + w3.
inline MixingConfig from_frequencies(const Transitions& t, double w1, double w2, double w3, cplx G2,
                                     cplx G3, double ws = -1) {
    MixingConfig c;
    c.g2 = saturation(G2, t.gamma10, t.gamma20);
    c.g3 = saturation(G3, t.gamma30, t.gamma20);
    const bool generated = ws < 0;
    if (generated) ws = w1 + w2 + w3;
    c.x1 = (w1 - t.w10) / t.gamma10;
    c.x02 = (w1 + w2 - t.w20) / t.gamma20;
    c.xs = (ws - t.w30) / t.gamma30;
    c.y1 = (ws - w3 - w2 - t.w10) / t.gamma10;
    c.y02 = (ws - w3 - t.w20) / t.gamma20;
    c.ys = (w1 + w2 + w3 - t.w30) / t.gamma30;
    return c;
}

struct Denominators {
    cplx P01, P02, P03, D01, D02, D03;
};

inline Denominators denominators(const MixingConfig& c) {
    return {cplx(1, c.x1), cplx(1, c.x02), cplx(1, c.xs), cplx(1, c.y1), cplx(1, c.y02), cplx(1, c.ys)};
}

struct EITFactors {
    cplx f1, fs, f;
};

namespace detail {

inline cplx invert(cplx bracket, const char* what) {
    if (std::abs(bracket) < 1e-300 || !std::isfinite(std::abs(bracket)))
        fail(NumericalError::Kind::SingularDenominator, what);
    return 1.0 / bracket;
}

} // namespace detail

// The dressed denominators nest: the w1 chain sees the 0-2 coherence dressed
// by g3, the ws chain sees it dressed by g2.
//   f1 = {1 + g2/(P01 P02 [1 + g3/(P02 D03)])}^-1
//   fs = {1 + g3/(P03 D02 [1 + g2/(D02 D01)])}^-1
//   f  = [1 + g2/(D02 D01) + g3/(D03 P02)]^-1
// The flat bracket 1 + (g2/(P01 P02))(1 + g3/(P02 D03))
// does not satisfy f = f1 [1 + g3/(D03 P02)]^-1 and is not used.
inline EITFactors eit_factors(const MixingConfig& c) {
    auto d = denominators(c);
    EITFactors r;
    cplx dress3 = 1.0 + c.g3 / (d.P02 * d.D03);
    cplx dress2 = 1.0 + c.g2 / (d.D02 * d.D01);
    r.f1 =detail::invert(1.0 + c.g2 / (d.P01 * d.P02 * dress3), "f1 bracket");
    r.fs = detail::invert(1.0 + c.g3 / (d.P03 * d.D02 * dress2), "fs bracket");
    r.f = detail::invert(1.0 + c.g2 / (d.D02 * d.D01) + c.g3 / (d.D03 * d.P02), "f bracket");
    return r;
}

// The same factor reached through f1, exact when D0i = P0i.
inline cplx f_via_f1(const MixingConfig& c) {
    auto d = denominators(c);
    return eit_factors(c).f1 * detail::invert(1.0 + c.g3 / (d.D03 * d.P02), "f bracket");
}

struct Susceptibilities {
    cplx chi1, chis, chiNL;
};

inline Susceptibilities susceptibilities(const MixingConfig& c) {
    auto d = denominators(c);
    auto e = eit_factors(c);
    return {c.chi1_0 / d.P01 * e.f1, c.chis_0 / d.P03 * e.fs, c.chiNL_0 / (d.P01 * d.P02 * d.P03) * e.f};
}

// Generated power up to a constant: g2 g3 |chi_NL|^2 N^2.
inline double generated_power_scaling(const MixingConfig& c, double density) {
    return c.g2 * c.g3 * std::norm(susceptibilities(c).chiNL) * density * density;
}

// Output weighted by the single-pass transmission of the w1 wave over an
// optical length L (in units of the bare line-center absorption length).
inline double absorption_weighted_power(const MixingConfig& c, double density, double length) {
    return generated_power_scaling(c, density) * std::exp(-susceptibilities(c).chi1.imag() * length);
}

// Transparency induced only at ws by a field E4 on a 3-4 transition that does
// not take part in the mixing: g2 = 0, and g3 with its 0-2 denominator is
// replaced by g4 with the 0-4 denominator.
inline EITFactors output_dressing_factors(const MixingConfig& base, double g4, double x04, double y04) {
    MixingConfig c = base;
    c.g2 = 0;
    c.g3 = g4;
    c.x02 = x04;
    c.y02 = y04;
    return eit_factors(c);
}

inline Susceptibilities output_dressing_susceptibilities(const MixingConfig& base, double g4, double x04,
                                                         double y04) {
    auto d = denominators(base);
    auto e = output_dressing_factors(base, g4, x04, y04);
    return {base.chi1_0 / d.P01 * e.f1, base.chis_0 / d.P03 * e.fs,
            base.chiNL_0 / (d.P01 * d.P02 * d.P03) * e.f};
}

struct ScanRow {
    double x;
    cplx chi1, chis, chiNL;
    double power;
};

// Sweeps x1 (and y1 with it when the sum frequency is enforced).
inline std::vector<ScanRow> scan_x1(MixingConfig c, const std::vector<double>& grid, bool enforced,
                                    double density = 1.0) {
    std::vector<ScanRow> out;
    out.reserve(grid.size());
    for (double x : grid) {
        c.x1 = x;
        if (enforced) c.y1 = x;
        auto s = susceptibilities(c);
        out.push_back({x, s.chi1, s.chis, s.chiNL, generated_power_scaling(c, density)});
    }
    return out;
}

} // namespace nief::fwm

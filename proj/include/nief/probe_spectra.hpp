#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nief/steady_state.hpp"

namespace nief {

enum class ResponseKind { Complex, Absorption, Refraction, Susceptibility };

// Sampled dimensionless response on a strictly increasing detuning grid.
class SpectrumSeries {
public:
    SpectrumSeries() = default;
    SpectrumSeries(std::vector<double> grid, std::vector<cplx> values,
                   ResponseKind kind = ResponseKind::Complex, std::string label = {})
        : grid_(std::move(grid)), values_(std::move(values)), kind_(kind), label_(std::move(label)) {
        if (grid_.size() != values_.size())
            throw ValidationError("spectrum: sample count differs from grid size");
        for (std::size_t i = 1; i < grid_.size(); ++i)
            if (!(grid_[i] > grid_[i - 1]))
                throw ValidationError("spectrum: grid must be strictly increasing");
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return values_; }
    ResponseKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return grid_.size(); }

    std::vector<double> real() const {
        std::vector<double> r(values_.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].real();
        return r;
    }
    std::vector<double> imag() const {
        std::vector<double> r(values_.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].imag();
        return r;
    }

private:
    std::vector<double> grid_;
    std::vector<cplx> values_;
    ResponseKind kind_ = ResponseKind::Complex;
    std::string label_;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ValidationError("grid: need at least 2 points and hi > lo");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

// 4001 points over +-20 of the dominant width or Rabi frequency.
inline std::vector<double> default_grid(double scale, std::size_t n = 4001) {
    return linear_grid(-20 * scale, 20 * scale, n);
}

struct Peak {
    double position;
    double value;
};

// Local maxima of y refined by a parabola through the three nearest samples.
inline std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<Peak> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        double h = x[i + 1] - x[i];
        double h0 = x[i] - x[i - 1];
        double a = y[i - 1], b = y[i], c = y[i + 1];
        double denom = a - 2 * b + c;
        double shift = 0;
        if (std::abs(denom) > 0 && std::abs(h - h0) < 1e-9 * std::abs(h)) shift = 0.5 * (a - c) / denom;
        out.push_back({x[i] + shift * h, b - 0.25 * (a - c) * shift});
    }
    return out;
}

inline Peak global_peak(const std::vector<double>& x, const std::vector<double>& y) {
    auto peaks = find_peaks(x, y);
    if (peaks.empty()) {
        auto it = std::max_element(y.begin(), y.end());
        return {x[std::size_t(it - y.begin())], *it};
    }
    return *std::max_element(peaks.begin(), peaks.end(),
                             [](const Peak& a, const Peak& b) { return a.value < b.value; });
}

// ---------------------------------------------------------------------------
// Probe on the m-l transition with field 3 off.

namespace detail {

inline FieldSet with_detuning(FieldSet f, int field, double omega) {
    f.detuning[field - 1] = omega;
    return f;
}

} // namespace detail

inline SpectrumSeries absorption_spectrum_4(const LevelScheme& s, const FieldSet& fields,
                                            const std::vector<double>& grid) {
    require_valid(s);
    if (fields.rabi[2] != cplx(0))
        throw ValidationError("rabi3: must be zero for the field-4 absorption profile");
    const auto n = s.unperturbed();
    const double dn4 = n.l - n.m;
    if (dn4 == 0)
        fail(NumericalError::Kind::DivisionByZero, "unperturbed l-m population difference is zero");

    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto f = detail::with_detuning(fields, 4, grid[i]);
        auto d = build_denominators(s, f);
        auto x = interference_factors(s, f, d);
        auto dr = population_differences(saturated_populations(s, x));
        out[i] = s.width.lm * lambda_v_response_lm(x, dr) / (d.P(4) * dn4);
    }
    return SpectrumSeries(grid, std::move(out), ResponseKind::Absorption, "absorption_ml");
}

// Far-detuned (Raman) asymptote of the field-4 absorption profile.
inline double raman_asymptote_4(const LevelScheme& s, const FieldSet& fields, double omega4) {
    const auto n = s.unperturbed();
    const double dn4 = n.l - n.m;
    if (dn4 == 0)
        fail(NumericalError::Kind::DivisionByZero, "unperturbed l-m population difference is zero");
    auto f = detail::with_detuning(fields, 4, omega4);
    auto x = interference_factors(s, f, build_denominators(s, f));
    auto r = saturated_populations(s, x);
    const double gm = s.width.gm, lm = s.width.lm;
    const double o1 = fields.detuning[0];
    const double o4sq = omega4 * omega4;
    return lm * lm * (r.l - r.m) / (dn4 * o4sq) -
           gm * lm / (gm * gm + (omega4 - o1) * (omega4 - o1)) * std::norm(fields.rabi[0]) *
               (r.m - r.g) / (o4sq * dn4);
}

// ---------------------------------------------------------------------------
// V scheme g-n-m: probe on g-n, strong field on n-m, n the ground level.

struct ProbePopulations {
    double n = 1, g = 0, m = 0;
    double reference = 1; // unperturbed n-g difference used for normalization
};

// Populations as a function of (|G_3|^2, Omega_3).
using PopulationModel = std::function<ProbePopulations(double, double)>;

inline PopulationModel fixed_populations(ProbePopulations p) {
    return [p](double, double) { return p; };
}

// Open-scheme rate balance with field 1 absent.
inline PopulationModel rate_balance_populations(const LevelScheme& s) {
    return [s](double rabi_sq, double omega3) {
        FieldSet f;
        f.rabi[2] = std::sqrt(rabi_sq);
        f.detuning[2] = omega3;
        auto x = interference_factors(s, f, build_denominators(s, f));
        auto r = saturated_populations(s, x);
        auto n = s.unperturbed();
        return ProbePopulations{r.n, r.g, r.m, n.n - n.g};
    };
}

// Normalized complex probe response: Im is absorption (negative = gain),
// Re is the resonant refraction, both in units of the bare line-center values.
inline cplx vscheme_form_factor(const LevelScheme& s, double rabi_sq, double omega3, double omega2,
                                const ProbePopulations& p) {
    if (p.reference == 0)
        fail(NumericalError::Kind::DivisionByZero, "reference population difference is zero");
    const double gn = s.width.ng, gm = s.width.gm, nm = s.width.nm;
    const cplx P2(gn, omega2);
    const cplx P32c(gm, omega2 - omega3);
    const cplx P3c(nm, -omega3);
    const double dr2 = p.n - p.g, dr3 = p.n - p.m;
    return I * gn * (P32c * dr2 - rabi_sq * dr3 / P3c) / ((P2 * P32c + rabi_sq) * p.reference);
}

struct VSchemeSpectra {
    SpectrumSeries response;   // complex f
    SpectrumSeries absorption; // Im f
    SpectrumSeries refraction; // Re f
};

inline VSchemeSpectra vscheme_response(const LevelScheme& s, cplx G3, double omega3,
                                       const std::vector<double>& grid,
                                       const PopulationModel& model) {
    require_valid(s);
    const double g2 = std::norm(G3);
    const auto p = model(g2, omega3);
    std::vector<cplx> f(grid.size()), a(grid.size()), r(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f[i] = vscheme_form_factor(s, g2, omega3, grid[i], p);
        a[i] = f[i].imag();
        r[i] = f[i].real();
    }
    return {SpectrumSeries(grid, f, ResponseKind::Complex, "f"),
            SpectrumSeries(grid, a, ResponseKind::Absorption, "absorption"),
            SpectrumSeries(grid, r, ResponseKind::Refraction, "refraction")};
}

// Line-center absorption (Omega_2 = Omega_3 = 0).
inline double vscheme_center_absorption(const LevelScheme& s, double rabi_sq,
                                        const PopulationModel& model) {
    return vscheme_form_factor(s, rabi_sq, 0, 0, model(rabi_sq, 0)).imag();
}

// Discrete Hilbert transform: real part of a function analytic in the lower
// half plane from its sampled imaginary part (uniform grid). Only samples in
// [first, last) are evaluated; the rest of the output is left at zero.
inline std::vector<double> kramers_kronig_real(const std::vector<double>& x,
                                               const std::vector<double>& im, std::size_t first,
                                               std::size_t last) {
    const std::size_t n = x.size();
    if (n < 3 || im.size() != n) throw ValidationError("kramers_kronig: need matching samples");
    last = std::min(last, n);
    const double h = x[1] - x[0];
    std::vector<double> out(n, 0.0);
    for (std::size_t i = first; i < last; ++i) {
        double acc = 0;
        std::size_t kmax = std::min(i, n - 1 - i);
        for (std::size_t k = 1; k <= kmax; ++k) acc += (im[i - k] - im[i + k]) / double(k);
        for (std::size_t j = 0; j + kmax < i; ++j) acc += im[j] / double(i - j);
        for (std::size_t j = i + kmax + 1; j < n; ++j) acc -= im[j] / double(j - i);
        // the t = 0 end of the paired integrand carries -2 f'(x)
        double deriv = 0;
        if (i > 0 && i + 1 < n) deriv = (im[i + 1] - im[i - 1]) / (2 * h);
        out[i] = (acc - deriv * h) / std::numbers::pi;
    }
    return out;
}

inline std::vector<double> kramers_kronig_real(const std::vector<double>& x,
                                               const std::vector<double>& im) {
    return kramers_kronig_real(x, im, 0, x.size());
}

// ---------------------------------------------------------------------------
// Sum rule: integral of Re(-i r_2 / G_2) over the probe detuning.

struct SumRuleResult {
    double integral = 0;
    double pop_diff = 0;
    double ratio = 0; // integral / (pi * pop_diff)
};

// Grid wide enough for the sum rule: +-200 of the largest width or Rabi frequency.
inline std::vector<double> sum_rule_grid(const LevelScheme& s, const FieldSet& f,
                                         std::size_t n = 40001) {
    const auto& w = s.width;
    double scale = std::max({w.lg, w.ng, w.nm, w.lm, w.ln, w.gm, std::abs(f.rabi[0]),
                             std::abs(f.rabi[2]), std::abs(f.detuning[0]), std::abs(f.detuning[2])});
    return linear_grid(-200 * scale, 200 * scale, n);
}

// Populations are held at pop_diff; only the line shape responds to the fields.
inline SumRuleResult sum_rule_check(const LevelScheme& s, const FieldSet& fields,
                                    const std::array<double, 4>& pop_diff,
                                    const std::vector<double>& grid) {
    require_valid(s);
    std::vector<double> h(grid.size());
    double peak = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto f = detail::with_detuning(fields, 2, grid[i]);
        auto d = build_denominators(s, f);
        auto x = interference_factors(s, f, d);
        h[i] = (reduced_response_ng(x, pop_diff) / d.P(2)).real();
        peak = std::max(peak, std::abs(h[i]));
    }
    if (std::abs(h.front()) > 1e-4 * peak || std::abs(h.back()) > 1e-4 * peak)
        fail(NumericalError::Kind::GridTooNarrow, "integrand not negligible at the grid edges");

    double acc = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) acc += 0.5 * (h[i] + h[i - 1]) * (grid[i] - grid[i - 1]);
    // Wings fall off as 1/Omega^2; close them analytically.
    acc += h.front() * std::abs(grid.front()) + h.back() * std::abs(grid.back());

    SumRuleResult r;
    r.integral = acc;
    r.pop_diff = pop_diff[1];
    r.ratio = pop_diff[1] != 0 ? acc / (std::numbers::pi * pop_diff[1])
                               : std::numeric_limits<double>::quiet_NaN();
    return r;
}

inline SumRuleResult sum_rule_check(const LevelScheme& s, const FieldSet& fields,
                                    const std::vector<double>& grid) {
    auto x = interference_factors(s, fields, build_denominators(s, fields));
    return sum_rule_check(s, fields, population_differences(saturated_populations(s, x)), grid);
}

// ---------------------------------------------------------------------------
// Inversionless gain threshold at line center.

struct GainThresholdReport {
    double threshold_rabi_sq = std::numeric_limits<double>::quiet_NaN();
    bool satisfied = false;
    double left = 0;  // (r_n - r_m)|G_3|^2 / (Gamma Gamma_gm)
    double right = 0; // r_n - r_g
};

inline double gain_margin(const LevelScheme& s, double rabi_sq, const PopulationModel& model) {
    auto p = model(rabi_sq, 0);
    return (p.n - p.m) * rabi_sq / (s.width.nm * s.width.gm) - (p.n - p.g);
}

namespace detail {

template <class F>
std::optional<double> bisect_sign_change(F&& fn, double lo, double hi, double rel_tol = 1e-12) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) return std::nullopt;
    for (int it = 0; it < 200 && (hi - lo) > rel_tol * std::abs(hi); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = fn(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// Smallest |G_3|^2 in [lo, hi] where the gain inequality flips, by bisection.
inline std::optional<double> find_gain_threshold(const LevelScheme& s, const PopulationModel& model,
                                                 double lo, double hi) {
    return detail::bisect_sign_change([&](double g) { return gain_margin(s, g, model); }, lo, hi);
}

// Same threshold located from the sign change of the line-center absorption.
inline std::optional<double> find_absorption_sign_change(const LevelScheme& s,
                                                         const PopulationModel& model, double lo,
                                                         double hi) {
    return detail::bisect_sign_change(
        [&](double g) { return vscheme_center_absorption(s, g, model); }, lo, hi);
}

inline GainThresholdReport gain_threshold(const LevelScheme& s, cplx G3, const PopulationModel& model,
                                          double search_hi = 0) {
    require_valid(s);
    const double g2 = std::norm(G3);
    auto p = model(g2, 0);
    GainThresholdReport r;
    r.left = (p.n - p.m) * g2 / (s.width.nm * s.width.gm);
    r.right = p.n - p.g;
    r.satisfied = r.left >= r.right;
    if (search_hi <= 0) search_hi = 1e4 * s.width.nm * s.width.gm;
    if (auto t = find_gain_threshold(s, model, 0, search_hi)) r.threshold_rabi_sq = *t;
    return r;
}

} // namespace nief

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

// pchip.hpp in some Boost releases needs boost::math::isnan in scope.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "nief/core_scheme.hpp"
#include "nief/parallel.hpp"
#include "nief/quadrature.hpp"

namespace nief::lics {

// Energies are in angular-frequency units (hbar = 1), so a bound-free
// amplitude G_ie carries units of s^-1/2 and pi G_ie G_ej is a rate.
enum Level { g = 0, n = 1, l = 2, m = 3 };
inline constexpr int level_count = 4;

inline const char* level_name(int i) {
    static const char* names[] = {"g", "n", "l", "m"};
    return names[i];
}

// Energy dependence of one bound-free amplitude.
struct ContinuumProfile {
    enum class Kind { Flat, Lorentzian, Tabulated };
    Kind kind = Kind::Flat;
    double amplitude = 0;
    // Lorentzian: G = amplitude * width / sqrt((e - center)^2 + width^2),
    // so products of two such amplitudes are Lorentzian in energy.
    double center = 0, width = 1;
    // Tabulated: shape values at strictly increasing energies, scaled by amplitude.
    std::vector<double> energies, values;

    double at(double e) const {
        switch (kind) {
        case Kind::Flat: return amplitude;
        case Kind::Lorentzian: return amplitude * width / std::hypot(e - center, width);
        case Kind::Tabulated: break;
        }
        if (!spline) build();
        if (e < energies.front() || e > energies.back()) return 0;
        return amplitude * (*spline)(e);
    }

    // Energies where the profile is not smooth or has structure.
    std::vector<quad::Feature> features() const {
        if (kind == Kind::Lorentzian) return {{center, width}};
        return {};
    }

    std::vector<double> knots() const { return kind == Kind::Tabulated ? energies : std::vector<double>{}; }

    using Spline = boost::math::interpolators::pchip<std::vector<double>>;
    // Built by build(); validate() does so before any concurrent use.
    mutable std::shared_ptr<Spline> spline;

    void build() const {
        if (energies.size() != values.size() || energies.size() < 4)
            throw ValidationError("continuum.table: needs at least 4 (energy, value) pairs");
        for (std::size_t i = 1; i < energies.size(); ++i)
            if (!(energies[i] > energies[i - 1]))
                throw ValidationError("continuum.table: energies must increase strictly");
        auto x = energies, y = values;
        spline = std::make_shared<Spline>(std::move(x), std::move(y));
    }
};

inline ContinuumProfile flat_profile(double amplitude) {
    ContinuumProfile p;
    p.amplitude = amplitude;
    return p;
}

inline ContinuumProfile lorentzian_profile(double amplitude, double center, double width) {
    if (!(width > 0)) throw ValidationError("continuum.width: must be positive");
    ContinuumProfile p;
    p.kind = ContinuumProfile::Kind::Lorentzian;
    p.amplitude = amplitude;
    p.center = center;
    p.width = width;
    return p;
}

inline ContinuumProfile tabulated_profile(double amplitude, std::vector<double> energies, std::vector<double> values) {
    ContinuumProfile p;
    p.kind = ContinuumProfile::Kind::Tabulated;
    p.amplitude = amplitude;
    p.energies = std::move(energies);
    p.values = std::move(values);
    p.at(p.energies.empty() ? 0 : p.energies.front()); // validate now
    return p;
}

// A discrete level k reached nonresonantly: G_ik per bound level and the
// complex denominator p_gk. G_kj is taken as conj(G_jk).
struct DiscreteLevel {
    std::array<cplx, level_count> G{};
    cplx p{1, 0};
};

struct ContinuumCoupling {
    double lo = -1, hi = 1; // continuum support
    std::array<ContinuumProfile, level_count> G{};
    std::vector<DiscreteLevel> discrete;
    // k1..k4; derived from the widths when absent.
    std::optional<std::array<double, 4>> degeneracy;
    double tol = 1e-4;
    int max_doublings = 10;
};

// Widths, shifts and asymmetry parameters at one continuum energy.
struct Couplings {
    std::array<std::array<double, level_count>, level_count> gamma{}, delta{};
    std::array<double, 4> k{};
    double energy = 0;
    double pv_change = 0; // worst relative change at the last doubling

    // q_ij = delta_ij / gamma_ij. A pair with neither width nor shift is
    // uncoupled and reads 0.
    double q(int i, int j) const {
        const double w = gamma[i][j], s = delta[i][j];
        if (w != 0) return s / w;
        if (s == 0) return 0;
        fail(NumericalError::Kind::ZeroWidth,
             std::string("gamma_") + level_name(i) + level_name(j) + " vanishes while q is requested");
    }
};

namespace detail {

// PV of the integral of h(e)/(e0 - e) over [lo, hi] with the pole subtracted:
//   int (h(e) - h(e0))/(e0 - e) de + h(e0) ln((e0 - lo)/(hi - e0))
// on panels graded geometrically toward e0.
template <class H>
std::pair<double, double> principal_value(const H& h, double e0, double lo, double hi,
                                          std::vector<quad::Feature> features, const std::vector<double>& knots,
                                          double tol, int max_doublings) {
    const double h0 = h(e0);
    auto f = [&](double e) {
        const double d = e0 - e;
        return d == 0 ? 0.0 : (h(e) - h0) / d;
    };
    double fine = (hi - lo) * 1e-3;
    for (const auto& ft : features) fine = std::min(fine, ft.width);
    features.push_back({e0, fine});
    auto breaks = quad::graded_breaks(lo, hi, features, (hi - lo) / 16);
    for (double x : knots)
        if (x > lo && x < hi) breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double tail = h0 * std::log((e0 - lo) / (hi - e0));
    double scale = std::abs(h0);
    for (double x : breaks) scale = std::max(scale, std::abs(h(x)));
    double prev = quad::composite_legendre(f, breaks, 1) + tail;
    for (int split = 2, level = 0; level < max_doublings; split *= 2, ++level) {
        const double cur = quad::composite_legendre(f, breaks, split) + tail;
        const double change = std::abs(cur - prev) / std::max({std::abs(cur), scale, 1e-300});
        if (change <= tol) return {cur, change};
        prev = cur;
    }
    fail(NumericalError::Kind::PVNotConverged, "principal-value integral did not settle under doubling");
}

inline double ratio_or_zero(double num, double den) { return den == 0 ? 0.0 : num / den; }

} // namespace detail

inline void validate(const ContinuumCoupling& cc) {
    if (!(cc.hi > cc.lo)) throw ValidationError("continuum: support must satisfy lo < hi");
    for (const auto& p : cc.G)
        if (p.kind == ContinuumProfile::Kind::Tabulated && !p.spline) p.build();
    for (const auto& k : cc.discrete)
        if (!(k.p.real() > 0)) throw ValidationError("discrete.p: real part must be positive");
    if (cc.degeneracy)
        for (double k : *cc.degeneracy)
            if (!(k >= 0 && k <= 1)) throw ValidationError("degeneracy: factors must lie in [0, 1]");
    if (!(cc.tol > 0)) throw ValidationError("continuum.tol: must be positive");
}

// gamma_ij = pi G_ie G_ej + Re sum_k G_ik G_kj / p_gk
// delta_ij = PV int G_ie G_ej / (energy - e) de + Im sum_k G_ik G_kj / p_gk
inline Couplings derive_couplings(const ContinuumCoupling& cc, double energy) {
    validate(cc);
    if (!(energy > cc.lo && energy < cc.hi))
        throw ValidationError("energy: must lie strictly inside the continuum support");
    Couplings c;
    c.energy = energy;
    for (int i = 0; i < level_count; ++i) {
        for (int j = i; j < level_count; ++j) {
            const auto &a = cc.G[i], &b = cc.G[j];
            double w = std::numbers::pi * a.at(energy) * b.at(energy), s = 0;
            if (a.amplitude != 0 && b.amplitude != 0) {
                auto feats = a.features();
                for (auto f : b.features()) feats.push_back(f);
                auto knots = a.knots();
                for (double x : b.knots()) knots.push_back(x);
                auto [pv, change] = detail::principal_value([&](double e) { return a.at(e) * b.at(e); }, energy,
                                                            cc.lo, cc.hi, feats, knots, cc.tol, cc.max_doublings);
                s = pv;
                c.pv_change = std::max(c.pv_change, change);
            }
            c.gamma[i][j] = c.gamma[j][i] = w;
            c.delta[i][j] = c.delta[j][i] = s;
        }
    }
    for (int i = 0; i < level_count; ++i)
        for (int j = 0; j < level_count; ++j) {
            cplx sum = 0;
            for (const auto& k : cc.discrete) sum += k.G[i] * std::conj(k.G[j]) / k.p;
            c.gamma[i][j] += sum.real();
            c.delta[i][j] += sum.imag();
        }
    for (int i = 0; i < level_count; ++i)
        if (c.gamma[i][i] < 0) fail(NumericalError::Kind::NonPhysical, std::string("gamma_") + level_name(i) + level_name(i) + " < 0");

    if (cc.degeneracy) {
        c.k = *cc.degeneracy;
    } else {
        const auto& G = c.gamma;
        // k1 is normalized by gamma_ll so that a single nondegenerate channel gives 1.
        c.k = {detail::ratio_or_zero(G[g][l] * G[l][n], G[g][n] * G[l][l]),
               detail::ratio_or_zero(G[n][l] * G[l][n], G[l][l] * G[n][n]),
               detail::ratio_or_zero(G[g][l] * G[l][g], G[g][g] * G[l][l]),
               detail::ratio_or_zero(G[g][n] * G[n][g], G[g][g] * G[n][n])};
        for (double k : c.k)
            if (!(k >= -1e-9 && k <= 1 + 1e-9))
                fail(NumericalError::Kind::NonPhysical, "degeneracy factor outside [0, 1]");
    }
    return c;
}

// Couplings per continuum energy for one fixed coupling model; shared reads,
// one write per energy.
class CouplingCache {
public:
    explicit CouplingCache(ContinuumCoupling cc) : cc_(std::move(cc)) { validate(cc_); }

    Couplings at(double energy) {
        {
            std::shared_lock lock(mu_);
            if (auto it = cache_.find(energy); it != cache_.end()) return it->second;
        }
        Couplings c = derive_couplings(cc_, energy);
        std::unique_lock lock(mu_);
        return cache_.emplace(energy, c).first->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return cache_.size();
    }

private:
    ContinuumCoupling cc_;
    mutable std::shared_mutex mu_;
    std::map<double, Couplings> cache_;
};

// The X denominator carries the continuum ratio q_mn/(D_gm (1 + q_nn)); the
// alternative puts the discrete-field saturation g_mn/(D_gm (1 + g_nn)) there.
enum class XReading { Continuum, Saturation };

struct LicsParams {
    double gamma_gm = 1, gamma_gn = 1, gamma_gl = 1; // relaxation widths
    cplx G_mn = 0;
    XReading reading = XReading::Continuum;
};

// Detunings in rad/s:
//   d1  = w1 - w_gm
//   d2  = w1 + w2 - w_gn
//   dl  = w1 + w2 + w3 - w - w_gl
//   dmu = w_mu - (w1 + w2 + w3), zero for the generated wave
struct LicsDetunings {
    double d1 = 0, d2 = 0, dl = 0, dmu = 0;
};

struct LicsPoint {
    double x_l = 0, x_n = 0, y_l = 0, y_n = 0;
    cplx D, p, K, A, X, Y;
    cplx chi3;       // chi3 / chi3_0mu
    double alpha1;   // alpha(w1) / alpha_01
    double alpha_mu; // alpha(w_mu) / alpha_0mu
};

inline double fano_term(double y, double q) { return (y + q) * (y + q) / (1 + y * y); }

inline void validate(const LicsParams& p) {
    if (!(p.gamma_gm > 0) || !(p.gamma_gn > 0) || !(p.gamma_gl > 0))
        throw ValidationError("lics.gamma: relaxation widths must be positive");
}

inline LicsPoint lics_point(const Couplings& c, const LicsParams& p, const LicsDetunings& d) {
    const auto& G = c.gamma;
    const auto& S = c.delta;
    const double g_ll = G[l][l] / p.gamma_gl, g_nn = G[n][n] / p.gamma_gn;
    const double g_mn = std::norm(p.G_mn) / (p.gamma_gm * p.gamma_gn);
    const double beta_l = g_ll / (1 + g_ll), beta_n = g_nn / (1 + g_nn);
    const auto [k1, k2, k3, k4] = c.k;

    LicsPoint r;
    r.x_l = (d.dl - S[l][l]) / (p.gamma_gl + G[l][l]);
    r.x_n = (d.d2 - S[n][n]) / (p.gamma_gn + G[n][n]);
    r.y_l = (d.dl + d.dmu - S[l][l]) / (p.gamma_gl + G[l][l]);
    r.y_n = (d.d2 + d.dmu - S[n][n]) / (p.gamma_gn + G[n][n]);
    r.D = cplx(1, d.d1 / p.gamma_gm);
    r.p = cplx(1, (d.d1 + d.dmu) / p.gamma_gm);

    auto one_minus_iq = [&](int i, int j) { return cplx(1, -c.q(i, j)); };
    const double kb = k1 * beta_l;
    r.K = 1.0;
    r.A = 1.0;
    if (kb != 0) {
        r.K -= kb * one_minus_iq(n, l) * one_minus_iq(l, g) / (one_minus_iq(n, g) * cplx(1, r.x_l));
        r.A -= kb * one_minus_iq(l, n) * one_minus_iq(g, l) / (one_minus_iq(g, n) * cplx(1, r.y_l));
    }

    auto bracket = [&](double x_n, double x_l, cplx den) {
        cplx b(1, x_n);
        double num, sat;
        if (p.reading == XReading::Continuum) {
            num = c.q(m, n);
            sat = num != 0 ? c.q(n, n) : 0;
        } else {
            num = g_mn;
            sat = g_nn;
        }
        if (num != 0) {
            if (std::abs(1 + sat) < 1e-12) fail(NumericalError::Kind::SingularDenominator, "1 + q_nn vanishes");
            b += num / (den * (1 + sat));
        }
        const double kbb = k2 * beta_l * beta_n;
        if (kbb != 0) {
            const cplx w = one_minus_iq(n, l);
            b -= kbb * w * w / cplx(1, x_l);
        }
        return (1 + g_nn) * b;
    };
    r.X = bracket(r.x_n, r.x_l, r.D);
    r.Y = bracket(r.y_n, r.y_l, r.p);
    if (std::abs(r.X) < 1e-12) fail(NumericalError::Kind::SingularDenominator, "X vanishes");
    if (std::abs(r.Y) < 1e-12) fail(NumericalError::Kind::SingularDenominator, "Y vanishes");

    r.chi3 = r.K / (r.D * r.X);
    r.alpha1 = ((1.0 - g_mn / (r.D * r.X)) / r.D).real();
    r.alpha_mu = 1 - k3 * beta_l;
    if (k3 * beta_l != 0) r.alpha_mu += k3 * beta_l * fano_term(r.y_l, c.q(g, l));
    if (k4 * g_nn != 0) {
        const cplx w = one_minus_iq(g, n);
        r.alpha_mu -= (k4 * g_nn * r.A * r.A * w * w / r.Y).real();
    }
    return r;
}

// Probe: w1 is tuned with the generated wave following (d1, d2, dl move
// together). Generated: only w_mu is tuned.
enum class ScanAxis { Probe, Generated };

struct LicsSpectrum {
    std::vector<double> grid;
    std::vector<LicsPoint> points;

    std::vector<double> chi3_abs() const { return collect([](const LicsPoint& p) { return std::abs(p.chi3); }); }
    std::vector<double> alpha1() const { return collect([](const LicsPoint& p) { return p.alpha1; }); }
    std::vector<double> alpha_mu() const { return collect([](const LicsPoint& p) { return p.alpha_mu; }); }

private:
    template <class F>
    std::vector<double> collect(F f) const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(f(p));
        return out;
    }
};

inline LicsSpectrum lics_spectra(const Couplings& c, const LicsParams& p, const LicsDetunings& base, ScanAxis axis,
                                 const std::vector<double>& grid) {
    validate(p);
    LicsSpectrum s;
    s.grid = grid;
    s.points = parallel_map<LicsPoint>(grid.size(), [&](std::size_t i) {
        LicsDetunings d = base;
        if (axis == ScanAxis::Probe) {
            d.d1 += grid[i];
            d.d2 += grid[i];
            d.dl += grid[i];
        } else {
            d.dmu += grid[i];
        }
        return lics_point(c, p, d);
    });
    return s;
}

} // namespace nief::lics

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nief/errors.hpp"

namespace nief {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Level order used everywhere: l, g, n, m.
//
//   field 1 : l - g   (strong)
//   field 2 : g - n   (probe)
//   field 3 : n - m   (strong)
//   field 4 : m - l   (probe)
struct DecayRates {
    double l = 1, g = 1, n = 1, m = 1;
};

// Partial relaxation g->l, m->l, g->n, m->n.
struct BranchingRates {
    double gl = 0, ml = 0, gn = 0, mn = 0;
};

struct CoherenceWidths {
    double lg = 1, ng = 1, nm = 1, lm = 1, ln = 1, gm = 1;
};

struct PumpRates {
    double l = 0, g = 0, n = 0, m = 0;
};

struct Populations {
    double l = 0, g = 0, n = 0, m = 0;

    double total() const { return l + g + n + m; }
};

struct LevelScheme {
    DecayRates decay;
    BranchingRates branch;
    CoherenceWidths width;
    PumpRates pump;
    // Cascade variants flip the detuning sign of individual transitions.
    std::array<int, 4> detuning_sign{1, 1, 1, 1};

    // Populations in the absence of every field.
    Populations unperturbed() const {
        Populations p;
        p.g = pump.g / decay.g;
        p.m = pump.m / decay.m;
        p.l = (pump.l + branch.gl * p.g + branch.ml * p.m) / decay.l;
        p.n = (pump.n + branch.gn * p.g + branch.mn * p.m) / decay.n;
        return p;
    }
};

struct FieldSet {
    std::array<cplx, 4> rabi{};       // G_1..G_4
    std::array<double, 4> detuning{}; // Omega_1..Omega_4

    cplx G(int i) const { return rabi.at(i - 1); }
    double Omega(int i) const { return detuning.at(i - 1); }
};

struct ComplexDenominators {
    std::array<cplx, 4> one_photon{}; // P_1..P_4
    cplx ln_12, ln_43;                // P_12, P_43: l-n coherence
    cplx gm_32, gm_41;                // P_32, P_41: g-m coherence
    cplx mix_ng, mix_lm;              // d_2, d_4

    cplx P(int i) const { return one_photon.at(i - 1); }
};

inline ComplexDenominators build_denominators(const LevelScheme& s, const FieldSet& f) {
    const auto& w = s.width;
    double o1 = s.detuning_sign[0] * f.detuning[0];
    double o2 = s.detuning_sign[1] * f.detuning[1];
    double o3 = s.detuning_sign[2] * f.detuning[2];
    double o4 = s.detuning_sign[3] * f.detuning[3];
    ComplexDenominators d;
    d.one_photon = {cplx(w.lg, o1), cplx(w.ng, o2), cplx(w.nm, o3), cplx(w.lm, o4)};
    d.ln_12 = cplx(w.ln, o1 - o2);
    d.ln_43 = cplx(w.ln, o4 - o3);
    d.gm_32 = cplx(w.gm, o3 - o2);
    d.gm_41 = cplx(w.gm, o4 - o1);
    d.mix_ng = cplx(w.ng, o1 + o3 - o4);
    d.mix_lm = cplx(w.lm, o1 - o2 + o3);
    return d;
}

struct Violation {
    std::string field;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate_scheme(const LevelScheme& s) {
    ValidationReport r;
    auto check_finite = [&](const char* name, double v) {
        if (!std::isfinite(v)) r.push_back({name, "not finite"});
    };
    auto nonneg = [&](const char* name, double v) {
        check_finite(name, v);
        if (v < 0) r.push_back({name, "negative rate"});
    };
    auto positive = [&](const char* name, double v, const char* msg) {
        check_finite(name, v);
        if (!(v > 0)) r.push_back({name, msg});
    };

    positive("decay.l", s.decay.l, "zero level decay");
    positive("decay.g", s.decay.g, "zero level decay");
    positive("decay.n", s.decay.n, "zero level decay");
    positive("decay.m", s.decay.m, "zero level decay");

    nonneg("branch.gl", s.branch.gl);
    nonneg("branch.ml", s.branch.ml);
    nonneg("branch.gn", s.branch.gn);
    nonneg("branch.mn", s.branch.mn);
    if (s.branch.gl > s.decay.g) r.push_back({"branch.gl", "partial exceeds total"});
    if (s.branch.gn > s.decay.g) r.push_back({"branch.gn", "partial exceeds total"});
    if (s.branch.gl + s.branch.gn > s.decay.g * (1 + 1e-12))
        r.push_back({"branch.gl+branch.gn", "partial exceeds total"});
    if (s.branch.ml > s.decay.m) r.push_back({"branch.ml", "partial exceeds total"});
    if (s.branch.mn > s.decay.m) r.push_back({"branch.mn", "partial exceeds total"});
    if (s.branch.ml + s.branch.mn > s.decay.m * (1 + 1e-12))
        r.push_back({"branch.ml+branch.mn", "partial exceeds total"});

    positive("width.lg", s.width.lg, "zero coherence width");
    positive("width.ng", s.width.ng, "zero coherence width");
    positive("width.nm", s.width.nm, "zero coherence width");
    positive("width.lm", s.width.lm, "zero coherence width");
    positive("width.ln", s.width.ln, "zero coherence width");
    positive("width.gm", s.width.gm, "zero coherence width");

    nonneg("pump.l", s.pump.l);
    nonneg("pump.g", s.pump.g);
    nonneg("pump.n", s.pump.n);
    nonneg("pump.m", s.pump.m);

    for (int i = 0; i < 4; ++i)
        if (s.detuning_sign[i] != 1 && s.detuning_sign[i] != -1)
            r.push_back({"detuning_sign", "must be +1 or -1"});
    return r;
}

inline std::string describe(const ValidationReport& r) {
    std::string out;
    for (const auto& v : r) {
        if (!out.empty()) out += "; ";
        out += v.field + ": " + v.message;
    }
    return out;
}

inline void require_valid(const LevelScheme& s) {
    auto r = validate_scheme(s);
    if (!r.empty()) throw ValidationError(describe(r));
}

inline void require_finite(const FieldSet& f) {
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(f.rabi[i].real()) || !std::isfinite(f.rabi[i].imag()))
            throw ValidationError("rabi" + std::to_string(i + 1) + ": not finite");
        if (!std::isfinite(f.detuning[i]))
            throw ValidationError("detuning" + std::to_string(i + 1) + ": not finite");
    }
}

// |G|^2/(Gamma_a Gamma_b) below this marks a field safe for weak-probe formulas.
inline constexpr double default_weak_field_threshold = 1e-3;

// Probe fields are 2 (g-n) and 4 (m-l); saturation is measured against the
// decay of the two levels they connect.
inline bool is_probe_safe(const LevelScheme& s, const FieldSet& f, int field,
                          double threshold = default_weak_field_threshold) {
    double g2 = std::norm(f.G(field));
    switch (field) {
    case 2: return g2 / (s.decay.g * s.decay.n) < threshold;
    case 4: return g2 / (s.decay.m * s.decay.l) < threshold;
    default: throw ValidationError("only fields 2 and 4 are probes");
    }
}

} // namespace nief

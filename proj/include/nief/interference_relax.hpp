#pragma once

#include <vector>

#include "nief/core_scheme.hpp"

namespace nief::relax {

// Two upper levels n, n' sharing a lower level g; fields 1 (g-n) and 2 (g-n').
// O1 = w1 - w_ng, O2 = w2 - w_n'g, O = w2 - w1 - w_n'n, all in rad/s.
struct DoubletConfig {
    double O1 = 0, O2 = 0, O = 0;
    double gamma_ng = 1, gamma_npg = 1, gamma_nnp = 1;
};

struct DecayRates {
    double n = 1, np = 1, g = 0;
};

// Widths from level decay alone, Gamma_ij = (Gamma_i + Gamma_j)/2.
inline DoubletConfig spontaneous_only(const DecayRates& r, double O1 = 0, double O2 = 0, double O = 0) {
    if (!(r.n >= 0 && r.np >= 0 && r.g >= 0)) throw ValidationError("decay: rates must be non-negative");
    return {O1, O2, O, 0.5 * (r.n + r.g), 0.5 * (r.np + r.g), 0.5 * (r.n + r.np)};
}

// Collisional broadening added on top of the existing widths.
inline DoubletConfig with_collisions(DoubletConfig c, double d_nnp, double d_ng = 0, double d_npg = 0) {
    c.gamma_nnp += d_nnp;
    c.gamma_ng += d_ng;
    c.gamma_npg += d_npg;
    return c;
}

inline void validate(const DoubletConfig& c) {
    if (!(c.gamma_nnp > 0)) throw ValidationError("gamma_nnp: must be positive");
    if (!(c.gamma_ng >= 0) || !(c.gamma_npg >= 0)) throw ValidationError("gamma_ng, gamma_npg: must be non-negative");
}

// 1 - i (Gamma_nn' - Gamma_n'g - Gamma_ng) / (O + i Gamma_nn')
inline cplx doublet_bracket(const DoubletConfig& c) {
    validate(c);
    const double excess = c.gamma_nnp - c.gamma_npg - c.gamma_ng;
    return 1.0 - I * excess / cplx(c.O, c.gamma_nnp);
}

// Second-order coherence on n'-n with the overall constant dropped.
inline cplx doublet_coherence(const DoubletConfig& c) {
    return doublet_bracket(c) / (cplx(c.O2, c.gamma_npg) * cplx(c.O1, -c.gamma_ng));
}

// |bracket(O = 0) - 1|: the collision-induced resonance amplitude.
inline double resonance_contrast(DoubletConfig c) {
    c.O = 0;
    return std::abs(doublet_bracket(c) - 1.0);
}

inline std::vector<double> bracket_magnitude(DoubletConfig c, const std::vector<double>& O_grid) {
    std::vector<double> out;
    out.reserve(O_grid.size());
    for (double O : O_grid) {
        c.O = O;
        out.push_back(std::abs(doublet_bracket(c)));
    }
    return out;
}

} // namespace nief::relax

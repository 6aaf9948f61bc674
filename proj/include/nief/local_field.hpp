#pragma once

#include <cmath>
#include <vector>

#include "nief/probe_spectra.hpp"
#include "nief/units.hpp"

namespace nief::local_field {

struct LocalFieldConfig {
    double density = 0; // m^-3
    double dipole = 0;  // C m, on the probed l-m transition
    // Level shift of the ground state from resonant exchange; usually negligible.
    double ground_shift = 0; // rad/s
};

// Red shift of the probed transition, |d|^2 N / (3 eps0 hbar).
inline double shift(const LocalFieldConfig& c) {
    if (!(c.density >= 0)) throw ValidationError("density: must be non-negative");
    return c.dipole * c.dipole * c.density / (3 * units::eps0 * units::hbar);
}

// Resonance-exchange (self-broadening) halfwidth |d|^2 N / (6 eps0 hbar).
inline double self_broadening_width(const LocalFieldConfig& c) {
    return c.dipole * c.dipole * c.density / (6 * units::eps0 * units::hbar);
}

inline double width_ratio(const LocalFieldConfig& c, double gamma_lm) {
    if (!(gamma_lm > 0)) throw ValidationError("width.lm: zero coherence width");
    return shift(c) / gamma_lm;
}

struct Dielectric {
    cplx epsilon;
    cplx L; // local-field factor
};

inline Dielectric clausius_mossotti(cplx alpha, double density) {
    const cplx denom = 1.0 - alpha * density / 3.0;
    if (std::abs(denom) < 1e-10)
        fail(NumericalError::Kind::LorentzCatastrophe, "1 - alpha N / 3 vanishes");
    const cplx L = 1.0 / denom;
    return {1.0 + L * density * alpha, L};
}

// Form factor of the probe susceptibility on l-m with a strong field on n-m,
// l the only populated level:
//   f = Gamma_lm P43 / ((P4 - i delta) P43 + |G3|^2)
// The shift sits in the one-photon denominator only; the two-photon
// denominator P43 keeps its bare resonance.
inline cplx dressed_form_factor(const LevelScheme& s, const FieldSet& f, double delta,
                                double ground_shift = 0) {
    FieldSet g = f;
    g.detuning[3] += ground_shift;
    auto d = build_denominators(s, g);
    const cplx P4 = d.P(4), P43 = d.ln_43;
    const cplx denom = (P4 - I * delta) * P43 + std::norm(f.rabi[2]);
    if (std::abs(denom) == 0) fail(NumericalError::Kind::SingularDenominator, "form factor denominator");
    return s.width.lm * P43 / denom;
}

// Normalized susceptibility chi4/|chi4^0| = i f over a grid of Omega_4:
// Im is the absorption, Re the refraction.
inline SpectrumSeries dressed_probe_susceptibility(const LevelScheme& s, cplx G3, double omega3,
                                                   const std::vector<double>& grid,
                                                   const LocalFieldConfig& lf) {
    require_valid(s);
    const double delta = shift(lf);
    FieldSet f;
    f.rabi[2] = G3;
    f.detuning[2] = omega3;
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f.detuning[3] = grid[i];
        out[i] = I * dressed_form_factor(s, f, delta, lf.ground_shift);
    }
    return SpectrumSeries(grid, std::move(out), ResponseKind::Susceptibility, "chi4");
}

// E_4L / E_4 = 1 + chi4/3 = 1 + i C4 f, with C4 = delta / Gamma_lm.
inline cplx local_field_factor(cplx f_value, double c4) {
    if (!(c4 >= 0)) throw ValidationError("C4: must be non-negative");
    return 1.0 + I * c4 * f_value;
}

} // namespace nief::local_field

#pragma once

#include <cmath>
#include <numbers>

#include "nief/probe_spectra.hpp"
#include "nief/units.hpp"

namespace nief::sodium {

// V scheme n (ground 3S), g (3P1/2), m (3P3/2) in a buffer gas. Rates in 1/s,
// cross sections and densities in cgs as quoted in the literature.
struct CollisionModel {
    double nu_mg = 0;            // m -> g collisional transfer
    double nu_gm = 0;            // g -> m; overwritten in Boltzmann mode
    double delta_E_per_cm = 17.2;
    double temperature = 550;    // K
    double sigma_mg = 4e-15;     // cm^2
    double buffer_density = 0;   // cm^-3; 0 means ideal gas at buffer_pressure
    double buffer_pressure = units::atm;
    double mass_atom = 22.98977; // amu
    double mass_buffer = 4.002602;
    double gamma_g = 6.2e7;      // level decay rates
    double gamma_m = 6.2e7;
    double Gamma = 5e10;         // collisional halfwidth of the strong transition n-m
    double Gamma_gm = 0;         // two-photon coherence width; 0 means nu_mg
    double N = 1;
    bool boltzmann = true;

    // Strong-field line: D2, J = 1/2 -> 3/2.
    double wavelength = 589.0e-9; // m
    double j_lower = 0.5, j_upper = 1.5;
};

inline double boltzmann_exponent(const CollisionModel& m) {
    return units::wavenumber_to_joule(m.delta_E_per_cm) / (units::kB * m.temperature);
}

inline double boltzmann_factor(const CollisionModel& m) { return std::exp(-boltzmann_exponent(m)); }

// Maxwell mean relative speed (cm/s) of the atom/buffer pair.
inline double mean_relative_speed(const CollisionModel& m) {
    const double mu = m.mass_atom * m.mass_buffer / (m.mass_atom + m.mass_buffer) * units::amu;
    return 100.0 * std::sqrt(8 * units::kB * m.temperature / (std::numbers::pi * mu));
}

inline double buffer_density(const CollisionModel& m) {
    if (m.buffer_density > 0) return m.buffer_density;
    return m.buffer_pressure / (units::kB * m.temperature) * 1e-6;
}

inline double two_photon_width(const CollisionModel& m) { return m.Gamma_gm > 0 ? m.Gamma_gm : m.nu_mg; }

inline void require_rates(const CollisionModel& m) {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0) || !std::isfinite(v)) throw ValidationError(std::string(name) + ": negative rate");
    };
    nonneg(m.nu_mg, "nu_mg");
    nonneg(m.nu_gm, "nu_gm");
    nonneg(m.gamma_g, "gamma_g");
    nonneg(m.gamma_m, "gamma_m");
    if (!(m.Gamma > 0)) throw ValidationError("Gamma: zero coherence width");
    if (!(m.temperature > 0)) throw ValidationError("temperature: must be positive");
    if (!(m.gamma_g > 0) || !(m.gamma_m > 0)) throw ValidationError("gamma_g/gamma_m: zero level decay");
}

// Collision rate nu_mg = N_He v sigma; in Boltzmann mode nu_gm follows detailed balance.
inline CollisionModel with_estimated_rates(CollisionModel m) {
    m.nu_mg = buffer_density(m) * mean_relative_speed(m) * m.sigma_mg;
    if (m.boltzmann) m.nu_gm = m.nu_mg * boltzmann_factor(m);
    return m;
}

// Sodium D lines in helium at one atmosphere and 550 K.
inline CollisionModel sodium_helium_550K() { return with_estimated_rates(CollisionModel{}); }

// |G|^2 in rad^2/s^2 of the strong field from its intensity (W/cm^2), using
// the orientation-averaged dipole of the J -> J' line whose decay is gamma_m.
inline double rabi_sq_from_intensity(const CollisionModel& m, double intensity) {
    const double omega = units::two_pi * units::c / m.wavelength;
    const double reduced_sq = 3 * std::numbers::pi * units::eps0 * units::hbar *
                              std::pow(units::c, 3) * m.gamma_m * (2 * m.j_upper + 1) /
                              (std::pow(omega, 3) * (2 * m.j_lower + 1));
    const double d_sq = reduced_sq / 3;
    const double e_sq = 2 * intensity * 1e4 / (units::c * units::eps0);
    return d_sq * e_sq / (4 * units::hbar * units::hbar);
}

enum class Branch { Full, Simplified };

struct PopulationResult {
    double r_n = 0, r_g = 0, r_m = 0;
    double kappa = 0;
    double nm = 0;        // r_n - r_m
    double ng = 0;        // r_n - r_g
    double inversion = 0; // r_g - r_n, the quantity the simplified form returns
};

inline double saturation_parameter(const CollisionModel& m, double rabi_sq, double omega3,
                                   Branch branch = Branch::Full) {
    const double drive = 2 * rabi_sq * m.Gamma / (m.Gamma * m.Gamma + omega3 * omega3);
    if (branch == Branch::Simplified) {
        const double e = boltzmann_factor(m);
        return drive / m.gamma_m * (1 + 2 * e) / (1 + e);
    }
    const double up = m.nu_gm + m.gamma_g;
    return drive * (m.nu_mg + 2 * up) / (m.gamma_g * m.nu_mg + m.gamma_m * up);
}

// Coefficient c of the simplified branch, r_g - r_n = N (c kappa - 1)/(1 + kappa).
inline double inversion_coefficient(const CollisionModel& m, Branch branch = Branch::Simplified) {
    if (branch == Branch::Simplified) {
        const double e = boltzmann_factor(m);
        return (1 - e) / (1 + 2 * e);
    }
    const double up = m.nu_gm + m.gamma_g;
    return (m.nu_mg - up) / (m.nu_mg + 2 * up);
}

inline void check_regime(const CollisionModel& m) {
    const double nu_gm = m.nu_mg * boltzmann_factor(m);
    if (m.nu_mg - nu_gm <= std::max(m.gamma_g, m.gamma_m))
        fail(NumericalError::Kind::RegimeViolation,
             "nu_mg - nu_gm does not exceed the level decay; simplified populations invalid");
}

inline PopulationResult populations_from_kappa(const CollisionModel& m, double kappa, Branch branch) {
    PopulationResult r;
    r.kappa = kappa;
    r.nm = m.N / (1 + kappa);
    r.inversion = r.nm * (kappa * inversion_coefficient(m, branch) - 1);
    r.ng = -r.inversion;
    r.r_n = (m.N + r.nm + r.ng) / 3;
    r.r_m = r.r_n - r.nm;
    r.r_g = r.r_n - r.ng;
    return r;
}

inline PopulationResult populations(const CollisionModel& m, cplx G3, double omega3,
                                    Branch branch = Branch::Full) {
    require_rates(m);
    if (branch == Branch::Simplified) check_regime(m);
    return populations_from_kappa(m, saturation_parameter(m, std::norm(G3), omega3, branch), branch);
}

// |G_3|^2 that produces a given kappa at Omega_3 = 0.
inline double rabi_sq_for_kappa(const CollisionModel& m, double kappa, Branch branch = Branch::Full) {
    return kappa / saturation_parameter(m, 1.0, 0.0, branch);
}

// Zero of r_n - r_g: kappa* = 1/c.
inline double zero_inversion_kappa(const CollisionModel& m, Branch branch = Branch::Simplified) {
    const double c = inversion_coefficient(m, branch);
    if (!(c > 0))
        fail(NumericalError::Kind::RegimeViolation, "probe inversion cannot be reached by saturation");
    return 1 / c;
}

struct RateEstimates {
    double mean_speed = 0;      // cm/s
    double buffer_density = 0;  // cm^-3
    double nu_mg = 0, nu_gm = 0;
    double boltzmann_exponent = 0;
    double inversion_coefficient = 0;
    double kappa_per_intensity = 0; // per W/cm^2 at Omega_3 = 0
    double kappa_star = 0;
};

inline RateEstimates estimate_rates(const CollisionModel& in) {
    auto m = with_estimated_rates(in);
    RateEstimates r;
    r.mean_speed = mean_relative_speed(m);
    r.buffer_density = buffer_density(m);
    r.nu_mg = m.nu_mg;
    r.nu_gm = m.nu_gm;
    r.boltzmann_exponent = boltzmann_exponent(m);
    r.inversion_coefficient = inversion_coefficient(m);
    r.kappa_per_intensity = saturation_parameter(m, rabi_sq_from_intensity(m, 1.0), 0.0, Branch::Simplified);
    r.kappa_star = 1 / r.inversion_coefficient;
    return r;
}

// Relative line-center response at zero probe inversion, large-kappa limit.
inline double inversionless_gain_estimate(const CollisionModel& m) {
    return -m.gamma_m / (3 * two_photon_width(m));
}

// V scheme with the collisional widths: Gamma_gn = Gamma_nm = Gamma.
inline LevelScheme vscheme(const CollisionModel& m) {
    LevelScheme s;
    s.width.ng = m.Gamma;
    s.width.nm = m.Gamma;
    s.width.gm = two_photon_width(m);
    s.decay.g = m.gamma_g;
    s.decay.m = m.gamma_m;
    return s;
}

inline PopulationModel population_model(const CollisionModel& m, Branch branch = Branch::Full) {
    return [m, branch](double rabi_sq, double omega3) {
        auto r = populations(m, std::sqrt(rabi_sq), omega3, branch);
        return ProbePopulations{r.r_n, r.r_g, r.r_m, m.N};
    };
}

// Line-center response of the full V-scheme form factor at the given kappa.
inline double line_center_response(const CollisionModel& m, double kappa, Branch branch = Branch::Full) {
    const double g2 = rabi_sq_for_kappa(m, kappa, branch);
    auto r = populations_from_kappa(m, kappa, branch);
    return vscheme_form_factor(vscheme(m), g2, 0, 0, ProbePopulations{r.r_n, r.r_g, r.r_m, m.N}).imag();
}

} // namespace nief::sodium

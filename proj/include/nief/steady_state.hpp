#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nief/core_scheme.hpp"

namespace nief {

struct SteadyState {
    Populations pop;
    std::array<double, 4> pop_diff{}; // r_l-r_g, r_n-r_g, r_n-r_m, r_l-r_m
    std::array<cplx, 4> coherence{};  // r_1..r_4
    cplx mixing_ng{};                 // r~_2
    cplx mixing_lm{};                 // r~_4
};

inline std::array<double, 4> population_differences(const Populations& p) {
    return {p.l - p.g, p.n - p.g, p.n - p.m, p.l - p.m};
}

// Dressing factors of the probe responses by the strong fields 1 and 3.
struct InterferenceFactors {
    std::array<cplx, 8> g{};   // |G_1|^2 over pairs of denominators
    std::array<cplx, 8> v{};   // |G_3|^2 over pairs of denominators
    cplx u2{}, u3{};           // |G_4|^2 terms of the two-strong-field case
    double kappa1 = 0, kappa3 = 0;   // saturation parameters
    double kappa1_0 = 0, kappa3_0 = 0;
    std::array<double, 3> a{}; // branching of the field-1 saturation
    std::array<double, 3> b{}; // branching of the field-3 saturation
};

inline InterferenceFactors interference_factors(const LevelScheme& s, const FieldSet& f,
                                                const ComplexDenominators& d) {
    InterferenceFactors x;
    const double G1 = std::norm(f.rabi[0]);
    const double G3 = std::norm(f.rabi[2]);
    const double G4 = std::norm(f.rabi[3]);
    const cplx P1 = d.P(1), P2 = d.P(2), P3 = d.P(3), P4 = d.P(4);
    const cplx P12c = std::conj(d.ln_12), P43 = d.ln_43;
    const cplx P32c = std::conj(d.gm_32), P41 = d.gm_41;
    const cplx d2c = std::conj(d.mix_ng), d4c = std::conj(d.mix_lm);

    x.g = {G1 / (P41 * std::conj(P1)), G1 / (P12c * P2), G1 / (P12c * std::conj(P1)),
           G1 / (P41 * P4),            G1 / (P43 * d2c), G1 / (P41 * d2c),
           G1 / (P32c * d4c),          G1 / (P12c * d4c)};
    x.v = {G3 / (P43 * std::conj(P3)), G3 / (P32c * P2), G3 / (P32c * std::conj(P3)),
           G3 / (P43 * P4),            G3 / (P41 * d2c), G3 / (P43 * d2c),
           G3 / (P12c * d4c),          G3 / (P32c * d4c)};
    x.u2 = G4 / (P3 * std::conj(P43));
    x.u3 = G4 / (std::conj(P4) * std::conj(P43));

    const auto& D = s.decay;
    const auto& B = s.branch;
    const double open1 = D.l + D.g - B.gl;
    const double open3 = D.m + D.n - B.mn;
    x.kappa1_0 = 2 * open1 * G1 / (D.l * D.g * s.width.lg);
    x.kappa3_0 = 2 * open3 * G3 / (D.m * D.n * s.width.nm);
    x.kappa1 = x.kappa1_0 * s.width.lg * s.width.lg / std::norm(P1);
    x.kappa3 = x.kappa3_0 * s.width.nm * s.width.nm / std::norm(P3);

    x.a[0] = B.gn * D.l / (D.n * open1);
    x.a[2] = (D.g - B.gl) / open1;
    x.a[1] = 1 - x.a[0] - x.a[2];
    x.b[0] = B.ml * D.n / (D.l * open3);
    x.b[1] = (D.m - B.mn) / open3;
    x.b[2] = 1 - x.b[0] - x.b[1];
    return x;
}

// Populations saturated by the strong fields 1 and 3 (probes do not move them).
inline Populations saturated_populations(const LevelScheme& s, const InterferenceFactors& x) {
    const Populations n = s.unperturbed();
    const auto dn = population_differences(n);
    const double k1 = x.kappa1, k3 = x.kappa3;
    const double det = (1 + k1) * (1 + k3) - x.a[0] * k1 * x.b[0] * k3;
    const double scale = std::max(1.0, std::max(k1, k3));
    if (std::abs(det) < 1e-12 * scale * scale)
        fail(NumericalError::Kind::SingularDenominator, "population determinant vanishes");
    const double dr1 = ((1 + k3) * dn[0] + x.b[0] * k3 * dn[2]) / det;
    const double dr3 = ((1 + k1) * dn[2] + x.a[0] * k1 * dn[0]) / det;

    Populations r;
    r.m = n.m + (1 - x.b[1]) * k3 * dr3;
    r.g = n.g + (1 - x.a[2]) * k1 * dr1;
    r.n = n.n - x.b[1] * k3 * dr3 + x.a[0] * k1 * dr1;
    r.l = n.l + x.b[0] * k3 * dr3 - x.a[2] * k1 * dr1;
    return r;
}

// R_2 and R_4: probe coherences divided by their bare factor iG/P.
inline cplx reduced_response_ng(const InterferenceFactors& x, const std::array<double, 4>& dr) {
    const auto& g = x.g;
    const auto& v = x.v;
    cplx num = dr[1] * (1.0 + g[6] + v[6]) - v[2] * (1.0 + v[6] - g[7]) * dr[2] -
               g[2] * (1.0 + g[6] - v[7]) * dr[0];
    cplx den = (1.0 + g[1] + v[1]) + (g[6] + g[1] * (g[6] - v[7]) + v[6] + v[1] * (v[6] - g[7]));
    return num / den;
}

inline cplx reduced_response_lm(const InterferenceFactors& x, const std::array<double, 4>& dr) {
    const auto& g = x.g;
    const auto& v = x.v;
    cplx num = dr[3] * (1.0 + v[4] + g[4]) - g[0] * (1.0 + g[4] - v[5]) * dr[0] -
               v[0] * (1.0 + v[4] - g[5]) * dr[2];
    cplx den = (1.0 + g[3] + v[3]) + (v[4] + v[3] * (v[4] - g[5]) + g[4] + g[3] * (g[4] - v[5]));
    return num / den;
}

// Weak-probe responses at G_3 = 0 (Lambda/V reductions).
inline cplx lambda_v_response_ng(const InterferenceFactors& x, const std::array<double, 4>& dr) {
    return (dr[1] - x.g[2] * dr[0]) / (1.0 + x.g[1]);
}

inline cplx lambda_v_response_lm(const InterferenceFactors& x, const std::array<double, 4>& dr) {
    return (dr[3] - x.g[0] * dr[0]) / (1.0 + x.g[3]);
}

namespace detail {

// Four-wave mixing amplitudes follow from the coherences by back-substitution.
inline void fill_mixing(const FieldSet& f, const ComplexDenominators& d, SteadyState& st) {
    const cplx G1 = f.rabi[0], G2 = f.rabi[1], G3 = f.rabi[2], G4 = f.rabi[3];
    const cplx r1 = st.coherence[0], r2 = st.coherence[1], r3 = st.coherence[2],
               r4 = st.coherence[3];
    const cplx P12 = d.ln_12, P32 = d.gm_32, P41c = std::conj(d.gm_41),
               P43c = std::conj(d.ln_43);

    cplx lhs4 = d.mix_lm + std::norm(G1) / P32 + std::norm(G3) / P12;
    cplx rhs4 = G1 * G3 * std::conj(r2) * (1.0 / P32 + 1.0 / P12) -
                G1 * std::conj(G2) * r3 / P32 - G3 * std::conj(G2) * r1 / P12;
    st.mixing_lm = rhs4 / lhs4;

    cplx lhs2 = d.mix_ng + std::norm(G3) / P41c + std::norm(G1) / P43c;
    cplx rhs2 = G1 * G3 * std::conj(r4) * (1.0 / P41c + 1.0 / P43c) -
                G3 * std::conj(G4) * r1 / P41c - G1 * std::conj(G4) * r3 / P43c;
    st.mixing_ng = rhs2 / lhs2;
}

} // namespace detail

struct SolveOptions {
    bool enforce_weak_probe = true;
    double weak_field_threshold = default_weak_field_threshold;
};

inline void check_probes(const LevelScheme& s, const FieldSet& f, const SolveOptions& opt) {
    if (!opt.enforce_weak_probe) return;
    if (!is_probe_safe(s, f, 2, opt.weak_field_threshold))
        throw ValidationError("rabi2: probe field too strong for weak-probe solution");
    if (!is_probe_safe(s, f, 4, opt.weak_field_threshold))
        throw ValidationError("rabi4: probe field too strong for weak-probe solution");
}

inline SteadyState solve_closed_form(const LevelScheme& s, const FieldSet& f,
                                     const SolveOptions& opt = {}) {
    require_valid(s);
    require_finite(f);
    check_probes(s, f, opt);
    const auto d = build_denominators(s, f);
    const auto x = interference_factors(s, f, d);

    SteadyState st;
    st.pop = saturated_populations(s, x);
    const double scale = std::max(std::abs(s.unperturbed().total()), 1e-300);
    for (double p : {st.pop.l, st.pop.g, st.pop.n, st.pop.m})
        if (p < -1e-12 * scale)
            fail(NumericalError::Kind::NonPhysical, "negative population from rate inputs");
    st.pop_diff = population_differences(st.pop);
    const auto& dr = st.pop_diff;
    st.coherence[0] = I * f.rabi[0] * dr[0] / d.P(1);
    st.coherence[2] = I * f.rabi[2] * dr[2] / d.P(3);
    st.coherence[1] = I * f.rabi[1] * reduced_response_ng(x, dr) / d.P(2);
    st.coherence[3] = I * f.rabi[3] * reduced_response_lm(x, dr) / d.P(4);
    detail::fill_mixing(f, d, st);
    return st;
}

namespace detail {

// Real linear system assembled from complex-linear equations in z and conj(z).
class RealSystem {
public:
    using Scalar = long double;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    RealSystem(int n_complex, int n_real)
        : nc_(n_complex), nr_(n_real), A_(Mat::Zero(dim(), dim())), rhs_(Vec::Zero(dim())) {}

    int dim() const { return 2 * nc_ + nr_; }

    class Equation {
    public:
        Equation(RealSystem& sys, bool complex_eq) : sys_(sys), complex_(complex_eq) {}
        Equation& z(int k, cplx a) { zc_.push_back({k, a}); return *this; }
        Equation& zc(int k, cplx b) { zcc_.push_back({k, b}); return *this; }
        Equation& x(int j, cplx c) { xc_.push_back({j, c}); return *this; }
        Equation& rhs(cplx r) { rhs_ = r; return *this; }
        ~Equation() { sys_.emit(*this); }

    private:
        friend class RealSystem;
        RealSystem& sys_;
        bool complex_;
        std::vector<std::pair<int, cplx>> zc_, zcc_, xc_;
        cplx rhs_{};
    };

    Equation complex_eq() { return Equation(*this, true); }
    Equation real_eq() { return Equation(*this, false); }

    Vec solve(const char* what) const {
        if (row_ != dim()) fail(NumericalError::Kind::SingularSystem, "system not square");
        Eigen::FullPivLU<Mat> lu(A_);
        lu.setThreshold(1e-15L);
        if (!lu.isInvertible())
            fail(NumericalError::Kind::SingularSystem, std::string(what) + " matrix is singular");
        return lu.solve(rhs_);
    }

    cplx z(const Vec& sol, int k) const {
        return {double(sol(2 * k)), double(sol(2 * k + 1))};
    }
    double x(const Vec& sol, int j) const { return double(sol(2 * nc_ + j)); }

private:
    void emit(const Equation& e) {
        const int re = row_++;
        const int im = e.complex_ ? row_++ : -1;
        for (auto [k, a] : e.zc_) {
            A_(re, 2 * k) += a.real();
            A_(re, 2 * k + 1) += -a.imag();
            if (im >= 0) {
                A_(im, 2 * k) += a.imag();
                A_(im, 2 * k + 1) += a.real();
            }
        }
        for (auto [k, b] : e.zcc_) {
            A_(re, 2 * k) += b.real();
            A_(re, 2 * k + 1) += b.imag();
            if (im >= 0) {
                A_(im, 2 * k) += b.imag();
                A_(im, 2 * k + 1) += -b.real();
            }
        }
        for (auto [j, c] : e.xc_) {
            A_(re, 2 * nc_ + j) += c.real();
            if (im >= 0) A_(im, 2 * nc_ + j) += c.imag();
        }
        rhs_(re) = e.rhs_.real();
        if (im >= 0) rhs_(im) = e.rhs_.imag();
    }

    int nc_, nr_;
    int row_ = 0;
    Mat A_;
    Vec rhs_;
};

} // namespace detail

// Brute-force steady state: assembles every density-matrix equation (probe terms
// to first order) as one real linear system and solves it directly.
inline SteadyState oracle_solve(const LevelScheme& s, const FieldSet& f,
                                const SolveOptions& opt = {}) {
    require_valid(s);
    require_finite(f);
    check_probes(s, f, opt);
    const auto d = build_denominators(s, f);
    const cplx G1 = f.rabi[0], G2 = f.rabi[1], G3 = f.rabi[2], G4 = f.rabi[3];
    const cplx G1c = std::conj(G1), G2c = std::conj(G2), G3c = std::conj(G3);

    enum { r1, r3, r2, t2, r4, t4, r12, r43, r32, r41 };
    enum { L, Gg, N, M };
    detail::RealSystem sys(10, 4);

    sys.complex_eq().z(r1, d.P(1)).x(L, -I * G1).x(Gg, I * G1);
    sys.complex_eq().z(r3, d.P(3)).x(N, -I * G3).x(M, I * G3);

    sys.complex_eq().z(r2, d.P(2)).x(N, -I * G2).x(Gg, I * G2).zc(r32, I * G3).zc(r12, -I * G1);
    sys.complex_eq().z(r12, d.ln_12).zc(r2, I * G1).z(r1, -I * G2c).z(t4, -I * G3c);
    sys.complex_eq().z(r32, d.gm_32).z(r3, I * G2c).zc(r2, -I * G3).z(t4, I * G1c);
    sys.complex_eq().z(t4, d.mix_lm).z(r32, I * G1).z(r12, -I * G3);

    sys.complex_eq().z(r4, d.P(4)).x(L, -I * G4).x(M, I * G4).z(r41, I * G1).z(r43, -I * G3);
    sys.complex_eq().z(r41, d.gm_41).z(r4, I * G1c).zc(r1, -I * G4).zc(t2, -I * G3);
    sys.complex_eq().z(r43, d.ln_43).zc(r3, I * G4).z(r4, -I * G3c).zc(t2, I * G1);
    sys.complex_eq().z(t2, d.mix_ng).zc(r41, I * G3).zc(r43, -I * G1);

    const auto& D = s.decay;
    const auto& B = s.branch;
    sys.real_eq().x(Gg, D.g).z(r1, 2.0 * I * G1c).rhs(s.pump.g);
    sys.real_eq().x(M, D.m).z(r3, 2.0 * I * G3c).rhs(s.pump.m);
    sys.real_eq().x(L, D.l).z(r1, -2.0 * I * G1c).x(Gg, -B.gl).x(M, -B.ml).rhs(s.pump.l);
    sys.real_eq().x(N, D.n).z(r3, -2.0 * I * G3c).x(Gg, -B.gn).x(M, -B.mn).rhs(s.pump.n);

    const auto sol = sys.solve("density-matrix");
    SteadyState st;
    st.pop = {sys.x(sol, L), sys.x(sol, Gg), sys.x(sol, N), sys.x(sol, M)};
    st.pop_diff = population_differences(st.pop);
    st.coherence = {sys.z(sol, r1), sys.z(sol, r2), sys.z(sol, r3), sys.z(sol, r4)};
    st.mixing_ng = sys.z(sol, t2);
    st.mixing_lm = sys.z(sol, t4);
    return st;
}

// Two strong fields 3 (n-m) and 4 (m-l), fields 1 and 2 absent.
struct TwoStrongCoherences {
    cplx nm; // r_3
    cplx lm; // r_4
};

inline TwoStrongCoherences solve_two_strong(const LevelScheme& s, const FieldSet& f,
                                            double dr3, double dr4) {
    require_valid(s);
    require_finite(f);
    const auto d = build_denominators(s, f);
    const auto x = interference_factors(s, f, d);
    const cplx v1 = x.v[0], v4 = x.v[3];
    const cplx den4 = 1.0 + v4 + std::conj(x.u2);
    const cplx den3 = 1.0 + std::conj(v4) + x.u2;
    if (std::abs(den4) < 1e-12 || std::abs(den3) < 1e-12)
        fail(NumericalError::Kind::SingularDenominator, "1+v4+u2* vanishes");
    TwoStrongCoherences r;
    r.lm = I * f.rabi[3] / d.P(4) * ((1.0 + std::conj(x.u2)) * dr4 - v1 * dr3) / den4;
    r.nm = I * f.rabi[2] / d.P(3) * ((1.0 + std::conj(v4)) * dr3 - x.u3 * dr4) / den3;
    return r;
}

struct TwoStrongSteadyState {
    Populations pop;
    TwoStrongCoherences coherence;
    int iterations = 0;
};

namespace detail {

// Rate balance with fields 3 and 4 strong and field 1 absent.
inline Populations two_strong_rates(const LevelScheme& s, const FieldSet& f,
                                    const TwoStrongCoherences& c) {
    const auto& D = s.decay;
    const auto& B = s.branch;
    const double w3 = 2 * std::real(I * std::conj(f.rabi[2]) * c.nm);
    const double w4 = 2 * std::real(I * std::conj(f.rabi[3]) * c.lm);
    Populations p;
    p.g = s.pump.g / D.g;
    p.m = (s.pump.m - w3 - w4) / D.m;
    p.l = (s.pump.l + w4 + B.gl * p.g + B.ml * p.m) / D.l;
    p.n = (s.pump.n + w3 + B.gn * p.g + B.mn * p.m) / D.n;
    return p;
}

} // namespace detail

struct FixedPointOptions {
    double damping = 0.5;
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

// Coherences of the two-strong-field problem with populations iterated to
// self-consistency. The update is a damped Newton step on the population
// residual; a plain substitution diverges once the saturation exceeds a few.
inline TwoStrongSteadyState solve_two_strong_self_consistent(const LevelScheme& s,
                                                             const FieldSet& f,
                                                             const FixedPointOptions& opt = {}) {
    using Vec4 = Eigen::Vector4d;
    auto pack = [](const Populations& p) { return Vec4(p.l, p.g, p.n, p.m); };
    auto residual = [&](const Vec4& p) {
        auto c = solve_two_strong(s, f, p(2) - p(3), p(0) - p(3));
        return Vec4(p - pack(detail::two_strong_rates(s, f, c)));
    };

    Vec4 p = pack(s.unperturbed());
    const double scale = std::max(std::abs(p.sum()), 1e-300);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const Vec4 r = residual(p);
        Eigen::Matrix4d J;
        for (int j = 0; j < 4; ++j) {
            Vec4 e = Vec4::Zero();
            e(j) = scale;
            J.col(j) = (residual(p + e) - r) / scale;
        }
        Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
        if (!lu.isInvertible())
            fail(NumericalError::Kind::SingularSystem, "population Jacobian is singular");
        const Vec4 step = lu.solve(r);
        if (step.cwiseAbs().maxCoeff() < opt.tolerance * scale) {
            p -= step;
            TwoStrongSteadyState out;
            out.pop = {p(0), p(1), p(2), p(3)};
            out.coherence = solve_two_strong(s, f, p(2) - p(3), p(0) - p(3));
            out.iterations = it;
            return out;
        }
        p -= opt.damping * step;
    }
    throw NumericalError(NumericalError::Kind::SingularSystem,
                         "population fixed point did not converge");
}

// Direct solve of the two-strong-field problem, populations included.
inline TwoStrongSteadyState oracle_two_strong(const LevelScheme& s, const FieldSet& f) {
    require_valid(s);
    const auto d = build_denominators(s, f);
    const cplx G3 = f.rabi[2], G4 = f.rabi[3];
    enum { r3, r4, r43 };
    enum { L, Gg, N, M };
    detail::RealSystem sys(3, 4);
    sys.complex_eq().z(r3, d.P(3)).x(N, -I * G3).x(M, I * G3).zc(r43, -I * G4);
    sys.complex_eq().z(r4, d.P(4)).x(L, -I * G4).x(M, I * G4).z(r43, -I * G3);
    sys.complex_eq().z(r43, d.ln_43).zc(r3, I * G4).z(r4, -I * std::conj(G3));

    const auto& D = s.decay;
    const auto& B = s.branch;
    const cplx w3 = 2.0 * I * std::conj(G3), w4 = 2.0 * I * std::conj(G4);
    sys.real_eq().x(Gg, D.g).rhs(s.pump.g);
    sys.real_eq().x(M, D.m).z(r3, w3).z(r4, w4).rhs(s.pump.m);
    sys.real_eq().x(L, D.l).z(r4, -w4).x(Gg, -B.gl).x(M, -B.ml).rhs(s.pump.l);
    sys.real_eq().x(N, D.n).z(r3, -w3).x(Gg, -B.gn).x(M, -B.mn).rhs(s.pump.n);
    const auto sol = sys.solve("two-strong-field");
    TwoStrongSteadyState out;
    out.pop = {sys.x(sol, L), sys.x(sol, Gg), sys.x(sol, N), sys.x(sol, M)};
    out.coherence = {sys.z(sol, r3), sys.z(sol, r4)};
    return out;
}

} // namespace nief

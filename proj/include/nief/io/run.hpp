#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "nief/collisional_na.hpp"
#include "nief/doppler_avg.hpp"
#include "nief/fwm_eit.hpp"
#include "nief/gain_optimizer.hpp"
#include "nief/interference_relax.hpp"
#include "nief/io/config.hpp"
#include "nief/io/csv.hpp"
#include "nief/io/plot_script.hpp"
#include "nief/lics_continuum.hpp"
#include "nief/local_field.hpp"
#include "nief/parallel.hpp"
#include "nief/probe_spectra.hpp"

namespace nief::io {

inline constexpr const char* version = "0.1.0";

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> t = {"spectrum", "sumrule", "sodium",  "fwm",     "localfield",
                                               "doppler",  "lics",    "doublet", "optimize"};
    return t;
}

struct RunOptions {
    std::optional<std::string> task;   // overrides run.task
    std::optional<std::string> output; // overrides run.output
    std::optional<std::uint64_t> seed; // overrides run.seed
    std::optional<bool> plot;
};

struct RunResult {
    std::string task;
    std::uint64_t seed = 1;
    Table table;
    nlohmann::json results = nlohmann::json::object();
};

// ---------------------------------------------------------------------------
// Section readers.

inline LevelScheme read_level_scheme(const Config& c, const std::string& s = "scheme") {
    LevelScheme ls;
    auto& w = ls.width;
    w.lg = c.rate(s, "width.lg", w.lg);
    w.ng = c.rate(s, "width.ng", w.ng);
    w.nm = c.rate(s, "width.nm", w.nm);
    w.lm = c.rate(s, "width.lm", w.lm);
    w.ln = c.rate(s, "width.ln", w.ln);
    w.gm = c.rate(s, "width.gm", w.gm);
    auto& d = ls.decay;
    d.l = c.rate(s, "decay.l", d.l);
    d.g = c.rate(s, "decay.g", d.g);
    d.n = c.rate(s, "decay.n", d.n);
    d.m = c.rate(s, "decay.m", d.m);
    auto& b = ls.branch;
    b.gl = c.rate(s, "branch.gl", b.gl);
    b.ml = c.rate(s, "branch.ml", b.ml);
    b.gn = c.rate(s, "branch.gn", b.gn);
    b.mn = c.rate(s, "branch.mn", b.mn);
    auto& q = ls.pump;
    q.l = c.number(s, "pump.l", q.l);
    q.g = c.number(s, "pump.g", q.g);
    q.n = c.number(s, "pump.n", q.n);
    q.m = c.number(s, "pump.m", q.m);
    for (int i = 0; i < 4; ++i) {
        const std::string k = "sign." + std::to_string(i + 1);
        const long v = c.integer(s, k, 1);
        if (v != 1 && v != -1) throw ValidationError(s + "." + k + ": must be +1 or -1");
        ls.detuning_sign[i] = int(v);
    }
    auto report = validate_scheme(ls);
    if (!report.empty()) throw ValidationError(s + "." + report.front().field + ": " + report.front().message);
    return ls;
}

inline FieldSet read_fields(const Config& c, const std::string& s = "fields") {
    FieldSet f;
    for (int i = 0; i < 4; ++i) {
        f.rabi[i] = c.rate(s, "rabi" + std::to_string(i + 1), 0.0);
        f.detuning[i] = c.rate(s, "detuning" + std::to_string(i + 1), 0.0);
    }
    return f;
}

inline std::vector<double> read_grid(const Config& c, double lo, double hi, std::size_t points) {
    lo = c.rate("grid", "lo", lo);
    hi = c.rate("grid", "hi", hi);
    const long n = c.integer("grid", "points", long(points));
    if (!(hi > lo)) throw ValidationError("grid.hi: must exceed grid.lo");
    if (n < 2 || n > 10'000'000) throw ValidationError("grid.points: between 2 and 10^7");
    return linear_grid(lo, hi, std::size_t(n));
}

inline sodium::CollisionModel read_sodium(const Config& c) {
    const std::string s = "scheme";
    const std::string preset = c.text(s, "preset", "sodium_helium_550K");
    if (preset != "sodium_helium_550K") throw ValidationError(s + ".preset: unknown preset '" + preset + "'");
    sodium::CollisionModel m;
    m.delta_E_per_cm = c.number(s, "delta_E_per_cm", m.delta_E_per_cm);
    m.temperature = c.number(s, "temperature", m.temperature);
    m.sigma_mg = c.number(s, "sigma_mg", m.sigma_mg);
    m.buffer_density = c.number(s, "buffer_density", m.buffer_density);
    m.buffer_pressure = c.number(s, "buffer_pressure_atm", m.buffer_pressure / units::atm) * units::atm;
    m.mass_atom = c.number(s, "mass_atom", m.mass_atom);
    m.mass_buffer = c.number(s, "mass_buffer", m.mass_buffer);
    m.gamma_g = c.rate(s, "gamma_g", m.gamma_g);
    m.gamma_m = c.rate(s, "gamma_m", m.gamma_m);
    m.Gamma = c.rate(s, "Gamma", m.Gamma);
    m.Gamma_gm = c.rate(s, "Gamma_gm", m.Gamma_gm);
    m.N = c.number(s, "N", m.N);
    m.boltzmann = c.flag(s, "boltzmann", m.boltzmann);
    m.wavelength = c.number(s, "wavelength_nm", m.wavelength * 1e9) * 1e-9;
    m.j_lower = c.number(s, "j_lower", m.j_lower);
    m.j_upper = c.number(s, "j_upper", m.j_upper);
    if (!(m.temperature > 0)) throw ValidationError(s + ".temperature: must be positive");
    m = sodium::with_estimated_rates(m);
    if (c.has(s, "nu_mg")) {
        m.nu_mg = c.rate(s, "nu_mg");
        if (m.boltzmann) m.nu_gm = m.nu_mg * sodium::boltzmann_factor(m);
    }
    m.nu_gm = c.rate(s, "nu_gm", m.nu_gm);
    try {
        sodium::require_rates(m);
    } catch (const ValidationError& e) {
        throw ValidationError(s + "." + e.what());
    }
    return m;
}

inline lics::ContinuumProfile read_profile(const Config& c, const std::string& s, double amplitude) {
    const std::string kind = c.text(s, "profile", "flat");
    if (kind == "flat") return lics::flat_profile(amplitude);
    if (kind == "lorentzian")
        return lics::lorentzian_profile(amplitude, c.rate(s, "center"), c.rate(s, "width"));
    if (kind == "table") {
        return lics::tabulated_profile(amplitude, c.list(s, "table.energies", true), c.list(s, "table.values"));
    }
    throw ValidationError(s + ".profile: expected flat, lorentzian or table");
}

// ---------------------------------------------------------------------------
// Tasks. Each fills a table (first column the scan variable) and a JSON
// summary; none touches the file system.

namespace tasks {

inline void complex_columns(RunResult& r, const std::string& x, const std::vector<double>& grid,
                            const std::vector<cplx>& v) {
    r.table.columns = {x, "re", "im"};
    for (std::size_t i = 0; i < grid.size(); ++i) r.table.add({grid[i], v[i].real(), v[i].imag()});
}

inline void spectrum(const Config& c, RunResult& r) {
    c.require_section("fields");
    const auto s = read_level_scheme(c);
    const auto f = read_fields(c);
    const std::string kind = c.text("spectrum", "kind", "four_level");
    SpectrumSeries series;
    if (kind == "four_level") {
        auto grid = read_grid(c, -20 * s.width.lm, 20 * s.width.lm, 4001);
        series = absorption_spectrum_4(s, f, grid);
    } else if (kind == "vscheme") {
        auto grid = read_grid(c, -20 * s.width.ng, 20 * s.width.ng, 4001);
        PopulationModel model;
        const std::string pop = c.text("spectrum", "populations", "rate_balance");
        if (pop == "rate_balance") {
            model = rate_balance_populations(s);
        } else if (pop == "fixed") {
            ProbePopulations p;
            p.n = c.number("spectrum", "fixed.n", 1);
            p.g = c.number("spectrum", "fixed.g", 0);
            p.m = c.number("spectrum", "fixed.m", 0);
            p.reference = c.number("spectrum", "fixed.reference", 1);
            model = fixed_populations(p);
        } else {
            throw ValidationError("spectrum.populations: expected rate_balance or fixed");
        }
        series = vscheme_response(s, f.rabi[2], f.detuning[2], grid, model).response;
    } else {
        throw ValidationError("spectrum.kind: expected four_level or vscheme");
    }
    complex_columns(r, "detuning", series.grid(), series.values());
    auto pk = global_peak(series.grid(), series.imag());
    r.results["peak"] = {{"position", pk.position}, {"value", pk.value}};
}

inline void sumrule(const Config& c, RunResult& r) {
    c.require_section("sumrule");
    const auto s = read_level_scheme(c);
    FieldSet f = c.has("fields") ? read_fields(c) : FieldSet{};
    const auto rabis = c.list("sumrule", "rabi3", true);
    const auto dr = population_differences(s.unperturbed());
    if (dr[1] == 0) fail(NumericalError::Kind::DivisionByZero, "scheme.pump: unperturbed n-g population difference is zero");
    double biggest = 0;
    for (double g : rabis) biggest = std::max(biggest, std::abs(g));
    FieldSet wide = f;
    wide.rabi[2] = biggest;
    const auto grid = sum_rule_grid(s, wide, std::size_t(c.integer("sumrule", "points", 40001)));
    r.table.columns = {"rabi3", "integral", "pop_diff", "ratio"};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double g : rabis) {
        f.rabi[2] = g;
        auto res = sum_rule_check(s, f, dr, grid);
        r.table.add({g, res.integral, res.pop_diff, res.ratio});
        lo = std::min(lo, res.integral);
        hi = std::max(hi, res.integral);
    }
    r.results["relative_spread"] = (hi - lo) / std::abs(hi);
}

inline void sodium(const Config& c, RunResult& r) {
    const auto m = read_sodium(c);
    const auto est = sodium::estimate_rates(m);
    double intensity = c.number("sodium", "intensity", 0);
    if (intensity == 0) intensity = c.number("sodium", "power", 0.1) / c.number("sodium", "area", 1e-5);
    if (!(intensity > 0)) throw ValidationError("sodium.intensity: must be positive");
    const double g2 = sodium::rabi_sq_from_intensity(m, intensity);
    const double kfull = sodium::zero_inversion_kappa(m, sodium::Branch::Full);
    r.results["estimates"] = {
        {"delta_E_over_kT", est.boltzmann_exponent},
        {"mean_relative_speed_cm_per_s", est.mean_speed},
        {"buffer_density_per_cm3", est.buffer_density},
        {"nu_mg_per_s", est.nu_mg},
        {"nu_gm_per_s", est.nu_gm},
        {"inversion_coefficient", est.inversion_coefficient},
        {"kappa_per_W_per_cm2", est.kappa_per_intensity},
        {"kappa_zero_inversion", est.kappa_star},
        {"kappa_zero_inversion_full", kfull},
        {"intensity_W_per_cm2", intensity},
        {"rabi_over_2pi_GHz", std::sqrt(g2) / units::two_pi / 1e9},
        {"kappa_at_intensity", sodium::saturation_parameter(m, g2, 0, sodium::Branch::Simplified)},
        {"gain_estimate", sodium::inversionless_gain_estimate(m)},
        {"line_center_response_at_zero_inversion", sodium::line_center_response(m, kfull)},
    };
    const double kmax = c.number("sodium", "kappa_max", 200);
    const long n = c.integer("sodium", "points", 401);
    if (!(kmax > 0) || n < 2) throw ValidationError("sodium.kappa_max, sodium.points: must be positive");
    r.table.columns = {"kappa", "r_n", "r_g", "r_m", "inversion", "response"};
    for (long i = 0; i < n; ++i) {
        const double k = kmax * double(i) / double(n - 1);
        auto p = sodium::populations_from_kappa(m, k, sodium::Branch::Full);
        r.table.add({k, p.r_n, p.r_g, p.r_m, p.r_g - p.r_n, sodium::line_center_response(m, k)});
    }
}

inline void fwm(const Config& c, RunResult& r) {
    fwm::MixingConfig m;
    m.g2 = c.number("scheme", "g2", 0);
    m.g3 = c.number("scheme", "g3", 0);
    m.x02 = c.number("scheme", "x02", 0);
    m.xs = c.number("scheme", "xs", 0);
    m.y02 = c.number("scheme", "y02", m.x02);
    m.ys = c.number("scheme", "ys", m.xs);
    const bool enforced = c.flag("scheme", "enforced", true);
    if (enforced) m.enforce_sum_frequency();
    const double density = c.number("scheme", "density", 1);
    const double length = c.number("scheme", "length", 0);
    const auto grid = read_grid(c, -20, 20, 4001);
    auto rows = fwm::scan_x1(m, grid, enforced, density);
    r.table.columns = {"x1", "re", "im", "power", "weighted_power"};
    double best = -1, best_x = 0;
    for (const auto& row : rows) {
        auto mc = m;
        mc.x1 = row.x;
        if (enforced) mc.y1 = row.x;
        const double w = length > 0 ? fwm::absorption_weighted_power(mc, density, length) : row.power;
        r.table.add({row.x, row.chiNL.real(), row.chiNL.imag(), row.power, w});
        if (w > best) best = w, best_x = row.x;
    }
    r.results["optimum_x1"] = best_x;
    r.results["optimum_power"] = best;
}

inline void localfield(const Config& c, RunResult& r) {
    c.require_section("fields");
    c.require_section("localfield");
    const auto s = read_level_scheme(c);
    const auto f = read_fields(c);
    local_field::LocalFieldConfig lf;
    lf.density = c.number("localfield", "density");
    lf.dipole = c.number("localfield", "dipole_debye") * units::debye;
    lf.ground_shift = c.rate("localfield", "ground_shift", 0);
    const auto grid = read_grid(c, -20 * s.width.lm, 20 * s.width.lm, 4001);
    auto sp = local_field::dressed_probe_susceptibility(s, f.rabi[2], f.detuning[2], grid, lf);
    complex_columns(r, "detuning", sp.grid(), sp.values());
    r.results["shift"] = local_field::shift(lf);
    r.results["C4"] = local_field::width_ratio(lf, s.width.lm);
}

inline void doppler(const Config& c, RunResult& r) {
    c.require_section("doppler");
    const auto s = read_level_scheme(c);
    doppler::DopplerConfig d;
    d.u = c.number("doppler", "u");
    d.k = {c.number("doppler", "k1", 1), c.number("doppler", "k2", 1), c.number("doppler", "k3", 1)};
    d.N_g = c.number("doppler", "N_g", 1);
    d.N_n = c.number("doppler", "N_n", 0);
    d.N_l = c.number("doppler", "N_l", 0);
    d.N_m = c.number("doppler", "N_m", 0);
    d.span = c.number("doppler", "span", d.span);
    d.tol = c.number("doppler", "tol", d.tol);
    const double O2 = c.rate("doppler", "omega2", 0), O3 = c.rate("doppler", "omega3", 0);
    const double ku = d.k[1] * d.u;
    const auto grid = read_grid(c, -3 * ku, 3 * ku, 601);
    auto sum = d;
    sum.scheme = doppler::MixingScheme::Sum;
    struct Row {
        cplx diff, sum, closed;
        double change;
    };
    auto rows = parallel_map<Row>(grid.size(), [&](std::size_t i) {
        doppler::Detunings det{grid[i], O2, O3};
        auto a = doppler::chi3_averaged(s, det, d);
        auto b = doppler::chi3_average_numeric(s, det, sum);
        return Row{a.numeric.value, b.value, a.closed, std::max(a.numeric.last_change, b.last_change)};
    });
    r.table.columns = {"detuning", "abs_difference", "arg_difference", "abs_sum", "arg_sum", "abs_closed"};
    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& w = rows[i];
        r.table.add({grid[i], std::abs(w.diff), std::arg(w.diff), std::abs(w.sum), std::arg(w.sum), std::abs(w.closed)});
        worst = std::max(worst, w.change);
    }
    r.results["worst_doubling_change"] = worst;
}

inline void lics(const Config& c, RunResult& r) {
    c.require_section("continuum");
    const std::string s = "continuum";
    lics::ContinuumCoupling cc;
    cc.lo = c.rate(s, "lo");
    cc.hi = c.rate(s, "hi");
    const char* names[] = {"g", "n", "l", "m"};
    for (int i = 0; i < 4; ++i) cc.G[i] = read_profile(c, s, c.number(s, std::string("amp.") + names[i], 0));
    if (c.has(s, "degeneracy")) {
        auto k = c.list(s, "degeneracy");
        if (k.size() != 4) throw ValidationError(s + ".degeneracy: four factors");
        cc.degeneracy = std::array<double, 4>{k[0], k[1], k[2], k[3]};
    }
    if (c.has(s, "discrete.G")) {
        auto g = c.list(s, "discrete.G");
        auto p = c.list(s, "discrete.p");
        if (g.size() != 4 || p.size() != 2) throw ValidationError(s + ".discrete: G needs 4 values, p needs re,im");
        lics::DiscreteLevel k;
        for (int i = 0; i < 4; ++i) k.G[i] = g[i];
        k.p = cplx(p[0], p[1]);
        cc.discrete.push_back(k);
    }
    cc.tol = c.number(s, "tol", cc.tol);
    const auto couplings = lics::derive_couplings(cc, c.rate(s, "energy", 0.5 * (cc.lo + cc.hi)));

    lics::LicsParams p;
    p.gamma_gm = c.rate("scheme", "gamma_gm", 1);
    p.gamma_gn = c.rate("scheme", "gamma_gn", 1);
    p.gamma_gl = c.rate("scheme", "gamma_gl", 1);
    p.G_mn = c.rate("scheme", "G_mn", 0);
    const std::string reading = c.text("scheme", "reading", "continuum");
    if (reading == "continuum")
        p.reading = lics::XReading::Continuum;
    else if (reading == "saturation")
        p.reading = lics::XReading::Saturation;
    else
        throw ValidationError("scheme.reading: expected continuum or saturation");

    lics::LicsDetunings d{c.rate("lics", "d1", 0), c.rate("lics", "d2", 0), c.rate("lics", "dl", 0),
                          c.rate("lics", "dmu", 0)};
    const std::string axis = c.text("lics", "axis", "probe");
    if (axis != "probe" && axis != "generated") throw ValidationError("lics.axis: expected probe or generated");
    const auto grid = read_grid(c, -20 * p.gamma_gm, 20 * p.gamma_gm, 4001);
    auto sp = lics::lics_spectra(couplings, p, d, axis == "probe" ? lics::ScanAxis::Probe : lics::ScanAxis::Generated,
                                 grid);
    r.table.columns = {"detuning", "chi3_re", "chi3_im", "chi3_abs", "alpha1", "alpha_mu"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& pt = sp.points[i];
        r.table.add({grid[i], pt.chi3.real(), pt.chi3.imag(), std::abs(pt.chi3), pt.alpha1, pt.alpha_mu});
    }
    nlohmann::json gam = nlohmann::json::array(), del = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
        gam.push_back(std::vector<double>(couplings.gamma[i].begin(), couplings.gamma[i].end()));
        del.push_back(std::vector<double>(couplings.delta[i].begin(), couplings.delta[i].end()));
    }
    r.results["gamma"] = gam;
    r.results["delta"] = del;
    r.results["degeneracy"] = couplings.k;
    r.results["pv_change"] = couplings.pv_change;
}

inline void doublet(const Config& c, RunResult& r) {
    relax::DoubletConfig d;
    if (c.has("scheme", "decay.n")) {
        d = relax::spontaneous_only({c.rate("scheme", "decay.n"), c.rate("scheme", "decay.np"),
                                     c.rate("scheme", "decay.g", 0)});
    } else {
        d.gamma_ng = c.rate("scheme", "gamma_ng");
        d.gamma_npg = c.rate("scheme", "gamma_npg");
        d.gamma_nnp = c.rate("scheme", "gamma_nnp");
    }
    d = relax::with_collisions(d, c.rate("scheme", "collision.nnp", 0), c.rate("scheme", "collision.ng", 0),
                               c.rate("scheme", "collision.npg", 0));
    d.O1 = c.rate("doublet", "omega1", 0);
    d.O2 = c.rate("doublet", "omega2", 0);
    const auto grid = read_grid(c, -20 * d.gamma_nnp, 20 * d.gamma_nnp, 2001);
    r.table.columns = {"detuning", "re", "im", "abs"};
    for (double O : grid) {
        d.O = O;
        cplx b = relax::doublet_bracket(d);
        r.table.add({O, b.real(), b.imag(), std::abs(b)});
    }
    r.results["contrast"] = relax::resonance_contrast(d);
}

inline void optimize(const Config& c, RunResult& r) {
    c.require_section("optimize");
    const std::string o = "optimize";
    const std::string problem = c.text(o, "problem", "vscheme");
    opt::OptimizationProblem p;
    if (problem == "sodium") {
        p = opt::sodium_problem(read_sodium(c), c.number(o, "kappa_max", 200));
    } else if (problem == "vscheme") {
        opt::VSchemeSearch in;
        in.scheme = read_level_scheme(c);
        const std::string obj = c.text(o, "objective", "center");
        if (obj == "center")
            in.objective = opt::Objective::GainAtCenter;
        else if (obj == "max")
            in.objective = opt::Objective::MaxGain;
        else if (obj == "bandwidth")
            in.objective = opt::Objective::GainBandwidth;
        else
            throw ValidationError("optimize.objective: expected center, max or bandwidth");
        in.rabi_sq = {"rabi_sq", c.number(o, "rabi_sq.lo", 0), c.number(o, "rabi_sq.hi")};
        in.omega3 = {"omega3", c.rate(o, "omega3.lo", 0), c.rate(o, "omega3.hi", 0)};
        const std::pair<const char*, opt::PumpTarget> pumps[] = {
            {"l", opt::PumpTarget::l}, {"g", opt::PumpTarget::g}, {"n", opt::PumpTarget::n}, {"m", opt::PumpTarget::m}};
        for (auto [name, target] : pumps) {
            const std::string k = std::string("pump.") + name;
            if (c.has(o, k + ".hi"))
                in.pumps.push_back({target, {k, c.number(o, k + ".lo", 0), c.number(o, k + ".hi")}});
        }
        p = opt::vscheme_problem(in);
    } else {
        throw ValidationError("optimize.problem: expected sodium or vscheme");
    }
    p.tolerance = c.number(o, "tolerance", 0);
    p.grid_points = int(c.integer(o, "grid_points", 32));
    p.seed = r.seed;
    auto rep = opt::optimize(p);
    nlohmann::json x = nlohmann::json::object();
    r.table.columns.clear();
    std::vector<double> row;
    for (std::size_t i = 0; i < p.variables.size(); ++i) {
        x[p.variables[i].name] = rep.x[i];
        r.table.columns.push_back(p.variables[i].name);
        row.push_back(rep.x[i]);
    }
    r.table.columns.insert(r.table.columns.end(), {"objective", "inversion"});
    row.insert(row.end(), {rep.objective, rep.inversion});
    r.table.add(row);
    r.results["optimum"] = {{"x", x},
                            {"objective", rep.objective},
                            {"inversion", rep.inversion},
                            {"residual", rep.residual},
                            {"feasible", rep.feasible},
                            {"evaluations", rep.evaluations}};
}

} // namespace tasks

inline std::string resolve_task(const Config& c, const RunOptions& opt) {
    if (c.empty() || !c.has("scheme")) throw ValidationError("missing scheme");
    std::string task = opt.task ? *opt.task : c.text("run", "task", "");
    if (task.empty()) throw ValidationError("run.task: missing task");
    if (std::find(task_names().begin(), task_names().end(), task) == task_names().end())
        throw ValidationError("run.task: exactly one of spectrum, sumrule, sodium, fwm, localfield, doppler, lics, "
                              "doublet, optimize; got '" + task + "'");
    return task;
}

// Runs the configured task without touching the file system.
inline RunResult execute(const Config& c, const RunOptions& opt = {}) {
    RunResult r;
    r.task = resolve_task(c, opt);
    const long seed = c.integer("run", "seed", 1);
    if (seed < 0) throw ValidationError("run.seed: must be non-negative");
    r.seed = opt.seed ? *opt.seed : std::uint64_t(seed);
    static const std::map<std::string, std::function<void(const Config&, RunResult&)>> dispatch = {
        {"spectrum", tasks::spectrum},     {"sumrule", tasks::sumrule}, {"sodium", tasks::sodium},
        {"fwm", tasks::fwm},               {"localfield", tasks::localfield}, {"doppler", tasks::doppler},
        {"lics", tasks::lics},             {"doublet", tasks::doublet}, {"optimize", tasks::optimize},
    };
    dispatch.at(r.task)(c, r);
    return r;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json sidecar(const Config& c, const RunResult& r) {
    Config echo = c;
    echo.set("run", "task", r.task);
    echo.set("run", "seed", std::to_string(r.seed));
    return {{"config", echo.to_json()},
            {"provenance", {{"version", version}, {"timestamp", utc_timestamp()}, {"seed", r.seed}}},
            {"results", r.results}};
}

struct WrittenFiles {
    std::string csv, json, plot;
};

inline WrittenFiles write_outputs(const Config& c, const RunResult& r, const RunOptions& opt) {
    namespace fs = std::filesystem;
    const std::string stem = opt.output ? *opt.output : c.text("run", "output", r.task);
    const fs::path base(stem);
    if (base.has_parent_path()) fs::create_directories(base.parent_path());
    WrittenFiles w{stem + ".csv", stem + ".json", {}};
    write_text(w.csv, to_csv(r.table));
    write_text(w.json, sidecar(c, r).dump(2) + "\n");
    if (opt.plot ? *opt.plot : c.flag("run", "plot", false)) w.plot = emit_plot_script(w.csv);
    return w;
}

// Exit codes: 0 success, 2 invalid input, 3 numerical failure.
inline int run(const std::string& config_path, const RunOptions& opt = {}, std::ostream& err = std::cerr) {
    try {
        const auto c = Config::load(config_path);
        const auto r = execute(c, opt);
        write_outputs(c, r, opt);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace nief::io

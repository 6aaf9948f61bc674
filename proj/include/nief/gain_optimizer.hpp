#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "nief/collisional_na.hpp"
#include "nief/parallel.hpp"
#include "nief/probe_spectra.hpp"

namespace nief::opt {

struct Variable {
    std::string name;
    double lo = 0, hi = 0;
};

struct Evaluation {
    double objective = 0; // maximized
    double inversion = 0; // r_upper - r_lower on the probe transition
};

// Evaluate must be pure: the grid phase calls it from several threads.
struct OptimizationProblem {
    std::vector<Variable> variables;
    std::function<Evaluation(const std::vector<double>&)> evaluate;
    double tolerance = 0; // feasible when inversion <= tolerance
    int grid_points = 32; // per dimension
    int max_iterations = 2000;
    double xtol = 1e-9; // simplex size relative to the box
    std::uint64_t seed = 1;
};

struct OptimumReport {
    std::vector<double> x;
    double objective = 0;
    double inversion = 0;
    double residual = 0; // max(0, inversion - tolerance)
    bool feasible = false;
    int evaluations = 0;
};

inline void validate(const OptimizationProblem& p) {
    if (p.variables.empty() || p.variables.size() > 4)
        throw ValidationError("optimize.variables: between 1 and 4 decision variables");
    for (const auto& v : p.variables)
        if (!std::isfinite(v.lo) || !std::isfinite(v.hi) || v.hi < v.lo)
            throw ValidationError("optimize." + v.name + ": bounds must be finite with lo <= hi");
    if (!(p.tolerance >= 0)) throw ValidationError("optimize.tolerance: must be non-negative");
    if (p.grid_points < 2) throw ValidationError("optimize.grid_points: at least 2");
    if (!p.evaluate) throw ValidationError("optimize: no objective");
}

namespace detail {

struct SimplexContext {
    const OptimizationProblem* problem;
    const std::vector<double>* lo;
    const std::vector<double>* span;
    int evaluations = 0;
};

// Unit-box coordinates clamped to [0, 1]; infeasible points sink below every
// feasible value so the simplex stays on the feasible side.
inline double penalized(const gsl_vector* u, void* params) {
    auto* ctx = static_cast<SimplexContext*>(params);
    std::vector<double> x(u->size);
    for (std::size_t i = 0; i < u->size; ++i)
        x[i] = (*ctx->lo)[i] + std::clamp(gsl_vector_get(u, i), 0.0, 1.0) * (*ctx->span)[i];
    ++ctx->evaluations;
    const auto e = ctx->problem->evaluate(x);
    if (!std::isfinite(e.objective)) return std::numeric_limits<double>::max();
    const double excess = e.inversion - ctx->problem->tolerance;
    if (excess > 0) return 1e100 * (1 + excess);
    return -e.objective;
}

} // namespace detail

// Coarse grid, then a Nelder-Mead simplex from the best feasible grid point.
inline OptimumReport optimize(const OptimizationProblem& p) {
    validate(p);
    const std::size_t d = p.variables.size();
    std::vector<double> lo(d), span(d);
    for (std::size_t i = 0; i < d; ++i) {
        lo[i] = p.variables[i].lo;
        span[i] = p.variables[i].hi - p.variables[i].lo;
    }

    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= span[i] > 0 ? p.grid_points : 1;
    auto point = [&](std::size_t idx) {
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (span[i] == 0) {
                x[i] = lo[i];
                continue;
            }
            x[i] = lo[i] + span[i] * double(idx % p.grid_points) / (p.grid_points - 1);
            idx /= p.grid_points;
        }
        return x;
    };
    const auto grid = parallel_map<Evaluation>(total, [&](std::size_t i) { return p.evaluate(point(i)); });

    OptimumReport r;
    r.evaluations = int(total);
    std::size_t best = total;
    for (std::size_t i = 0; i < total; ++i) {
        if (!(grid[i].inversion <= p.tolerance) || !std::isfinite(grid[i].objective)) continue;
        if (best == total || grid[i].objective > grid[best].objective) best = i;
    }
    if (best == total) fail(NumericalError::Kind::Infeasible, "no grid point satisfies the no-inversion constraint");
    r.x = point(best);
    r.objective = grid[best].objective;
    r.inversion = grid[best].inversion;

    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < d; ++i)
        if (span[i] > 0) free.push_back(i);
    if (!free.empty()) {
        // Simplex over the free coordinates only.
        std::vector<double> flo, fspan;
        for (auto i : free) flo.push_back(lo[i]), fspan.push_back(span[i]);
        const auto fixed = r.x;
        OptimizationProblem sub = p;
        sub.evaluate = [&](const std::vector<double>& y) {
            auto x = fixed;
            for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = y[k];
            return p.evaluate(x);
        };
        detail::SimplexContext ctx{&sub, &flo, &fspan};
        gsl_multimin_function fn{&detail::penalized, free.size(), &ctx};

        gsl_vector* start = gsl_vector_alloc(free.size());
        gsl_vector* step = gsl_vector_alloc(free.size());
        std::mt19937_64 rng(p.seed);
        const double cell = 1.0 / (p.grid_points - 1);
        for (std::size_t k = 0; k < free.size(); ++k) {
            gsl_vector_set(start, k, (r.x[free[k]] - flo[k]) / fspan[k]);
            // step direction from the seed; magnitude one grid cell
            gsl_vector_set(step, k, (rng() & 1 ? 1 : -1) * 0.5 * cell);
        }
        auto* state = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, free.size());
        auto old_handler = gsl_set_error_handler_off();
        gsl_multimin_fminimizer_set(state, &fn, start, step);
        for (int it = 0; it < p.max_iterations; ++it) {
            if (gsl_multimin_fminimizer_iterate(state)) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(state), p.xtol) != GSL_CONTINUE) break;
        }
        std::vector<double> y(free.size());
        for (std::size_t k = 0; k < free.size(); ++k)
            y[k] = flo[k] + std::clamp(gsl_vector_get(gsl_multimin_fminimizer_x(state), k), 0.0, 1.0) * fspan[k];
        gsl_set_error_handler(old_handler);
        gsl_multimin_fminimizer_free(state);
        gsl_vector_free(start);
        gsl_vector_free(step);

        r.evaluations += ctx.evaluations + 1;
        const auto e = sub.evaluate(y);
        if (e.inversion <= p.tolerance && e.objective >= r.objective) {
            for (std::size_t k = 0; k < free.size(); ++k) r.x[free[k]] = y[k];
            r.objective = e.objective;
            r.inversion = e.inversion;
        }
    }
    r.residual = std::max(0.0, r.inversion - p.tolerance);
    r.feasible = r.residual == 0;
    return r;
}

// ---------------------------------------------------------------------------
// Problem builders.

enum class Objective { GainAtCenter, MaxGain, GainBandwidth };

struct GainProfile {
    double peak = 0;      // largest gain (-Im f) over the probe scan
    double bandwidth = 0; // width of the positive-gain band holding the peak
};

inline GainProfile gain_profile(const LevelScheme& s, double rabi_sq, double omega3, const ProbePopulations& pop,
                                const std::vector<double>& grid) {
    std::vector<double> gain(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gain[i] = -vscheme_form_factor(s, rabi_sq, omega3, grid[i], pop).imag();
    const auto k = std::size_t(std::max_element(gain.begin(), gain.end()) - gain.begin());
    GainProfile g{gain[k], 0};
    if (g.peak > 0) {
        std::size_t a = k, b = k;
        while (a > 0 && gain[a - 1] > 0) --a;
        while (b + 1 < grid.size() && gain[b + 1] > 0) ++b;
        g.bandwidth = grid[b] - grid[a] + (grid.size() > 1 ? grid[1] - grid[0] : 0);
    }
    return g;
}

inline double objective_value(Objective o, const LevelScheme& s, double rabi_sq, double omega3,
                              const ProbePopulations& pop, const std::vector<double>& probe_grid) {
    if (o == Objective::GainAtCenter) return -vscheme_form_factor(s, rabi_sq, omega3, 0.0, pop).imag();
    auto g = gain_profile(s, rabi_sq, omega3, pop, probe_grid);
    if (o == Objective::MaxGain) return g.peak;
    return g.peak > 0 ? g.peak * g.bandwidth : g.peak;
}

// Which pump rate a decision variable drives.
enum class PumpTarget { l, g, n, m };

struct VSchemeSearch {
    LevelScheme scheme;
    Objective objective = Objective::GainAtCenter;
    Variable rabi_sq{"rabi_sq", 0, 0};
    Variable omega3{"omega3", 0, 0};
    std::vector<std::pair<PumpTarget, Variable>> pumps;
    // Populations used by both the objective and the constraint.
    std::function<PopulationModel(const LevelScheme&)> model = [](const LevelScheme& s) {
        return rate_balance_populations(s);
    };
    std::vector<double> probe_grid; // defaults to +-20 Gamma_ng
    double tolerance = 0;
    std::uint64_t seed = 1;
};

inline OptimizationProblem vscheme_problem(const VSchemeSearch& in) {
    require_valid(in.scheme);
    OptimizationProblem p;
    p.variables = {in.rabi_sq, in.omega3};
    for (const auto& [target, v] : in.pumps) p.variables.push_back(v);
    p.tolerance = in.tolerance;
    p.seed = in.seed;
    auto grid = in.probe_grid.empty() ? default_grid(in.scheme.width.ng, 801) : in.probe_grid;
    p.evaluate = [in, grid](const std::vector<double>& x) {
        LevelScheme s = in.scheme;
        for (std::size_t k = 0; k < in.pumps.size(); ++k) {
            const double q = x[2 + k];
            switch (in.pumps[k].first) {
            case PumpTarget::l: s.pump.l = q; break;
            case PumpTarget::g: s.pump.g = q; break;
            case PumpTarget::n: s.pump.n = q; break;
            case PumpTarget::m: s.pump.m = q; break;
            }
        }
        const auto pop = in.model(s)(x[0], x[1]);
        return Evaluation{objective_value(in.objective, s, x[0], x[1], pop, grid), pop.g - pop.n};
    };
    return p;
}

// Sodium: decision variable kappa; gain is the line-center response with the
// sign flipped, the constraint r_g <= r_n on the 3S-3P1/2 probe line.
inline OptimizationProblem sodium_problem(const sodium::CollisionModel& m, double kappa_hi,
                                          sodium::Branch branch = sodium::Branch::Full) {
    sodium::require_rates(m);
    if (!(kappa_hi > 0)) throw ValidationError("optimize.kappa: upper bound must be positive");
    OptimizationProblem p;
    p.variables = {{"kappa", 0, kappa_hi}};
    p.evaluate = [m, branch](const std::vector<double>& x) {
        auto r = sodium::populations_from_kappa(m, x[0], branch);
        return Evaluation{-sodium::line_center_response(m, x[0], branch), r.r_g - r.r_n};
    };
    return p;
}

} // namespace nief::opt

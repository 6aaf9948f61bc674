#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "nief/errors.hpp"

namespace nief::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Nodes are eigenvalues of the Jacobi matrix; weights come from the
// Christoffel function evaluated with Hermite functions, which stay bounded
// where the polynomials themselves would overflow.
inline Rule build_gauss_hermite(int n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double psi0 = std::pow(std::numbers::pi, -0.25);
    for (int i = 0; i < n; ++i) {
        const double x = es.eigenvalues()(i);
        double pm = 0, p = psi0 * std::exp(-0.5 * x * x), sum = p * p;
        for (int k = 0; k + 1 < n; ++k) {
            double next = std::sqrt(2.0 / (k + 1)) * x * p - std::sqrt(double(k) / (k + 1)) * pm;
            pm = p;
            p = next;
            sum += p * p;
        }
        r.nodes[i] = x;
        r.weights[i] = sum > 0 ? std::exp(-x * x) / sum : 0.0;
    }
    return r;
}

} // namespace detail

// n-point rule for the integral of exp(-x^2) g(x) over the real line.
inline const Rule& gauss_hermite(int n) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_hermite(n)).first;
    return it->second;
}

// Largest gap between neighbouring nodes near the origin, in units of x.
inline double gauss_hermite_spacing(int n) { return std::numbers::pi / std::sqrt(2.0 * n); }

inline constexpr int legendre_order = 20;

// Composite Gauss-Legendre over consecutive breakpoints, each panel split
// into `split` equal parts.
template <class F>
auto composite_legendre(const F& f, const std::vector<double>& breaks, int split = 1) {
    using boost::math::quadrature::gauss;
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double a = breaks[i - 1], b = breaks[i];
        const double h = (b - a) / split;
        for (int j = 0; j < split; ++j)
            acc += gauss<double, legendre_order>::integrate(f, a + j * h, a + (j + 1) * h);
    }
    return acc;
}

struct Feature {
    double center;
    double width; // > 0
};

// Breakpoints on [lo, hi] graded geometrically around each narrow feature and
// no panel wider than max_panel.
inline std::vector<double> graded_breaks(double lo, double hi, const std::vector<Feature>& features,
                                         double max_panel) {
    std::vector<double> b{lo, hi};
    for (const auto& ft : features) {
        if (!(ft.width > 0) || !std::isfinite(ft.center)) continue;
        const double c = std::clamp(ft.center, lo, hi);
        b.push_back(c);
        for (double s = 0.25 * ft.width; s < hi - lo; s *= 2) {
            if (c - s > lo) b.push_back(c - s);
            if (c + s < hi) b.push_back(c + s);
        }
    }
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    const double eps = 1e-12 * (hi - lo);
    for (double x : b)
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    std::vector<double> refined{out.front()};
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double a = out[i - 1], c = out[i];
        const int parts = std::max(1, int(std::ceil((c - a) / max_panel)));
        for (int j = 1; j <= parts; ++j) refined.push_back(a + (c - a) * j / parts);
    }
    return refined;
}

} // namespace nief::quad

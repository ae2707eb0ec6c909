#pragma once
// One-dimensional quadrature building blocks: Gauss-Legendre rules, composite
// panels, and adaptive Gauss-Kronrod (G7/K15) for vector-space valued integrands.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vortexlab/geometry.hpp"

namespace vortexlab::quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n), cached.
inline const Rule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");

    Rule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    // Returns (P_n(x), P_n'(x)).
    const auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair<double, double>{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    if (n == 1) {
        rule.weights[0] = 2.0;
    } else {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                const auto [p, dp] = legendre(x);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double dp = legendre(x).second;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.nodes[i] = -x;
            rule.nodes[n - 1 - i] = x;
            rule.weights[i] = w;
            rule.weights[n - 1 - i] = w;
        }
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// A quadrature point on a physical interval.
struct Point {
    double x;
    double w;
};

/// Gauss-Legendre points mapped to [a, b].
inline void append_panel(std::vector<Point>& out, double a, double b, int order) {
    const Rule& r = gauss_legendre(order);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        out.push_back({mid + half * r.nodes[i], half * r.weights[i]});
    }
}

/// Uniform composite rule: `panels` Gauss-Legendre panels of `order` points on [a, b].
inline std::vector<Point> composite(double a, double b, int panels, int order) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p) {
        append_panel(pts, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, order);
    }
    return pts;
}

/**
 * Geometrically graded composite rule on [a, b] with 0 < a < b: consecutive
 * panel endpoints differ by at most a factor `ratio`, and no panel is longer
 * than `max_width`. Resolves integrands behaving like powers of the radius.
 */
inline std::vector<Point> graded(double a, double b, int order, double ratio = 2.0,
                                 double max_width = 1e300) {
    std::vector<Point> pts;
    if (!(b > a)) return pts;
    if (a <= 0.0) throw std::invalid_argument("graded: lower endpoint must be positive");
    double lo = a;
    while (lo < b) {
        double hi = std::min({b, lo * ratio, lo + max_width});
        if (b - hi < 1e-14 * b) hi = b;
        append_panel(pts, lo, hi, order);
        lo = hi;
    }
    return pts;
}

namespace detail {
// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const Vec2& v) { return std::max(std::abs(v.x), std::abs(v.y)); }
inline double value_norm(const Mat2& m) { return m.norm(); }

template <class T, class F>
std::pair<T, double> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kron = kron + (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss = gauss + (f1 + f2) * kWg[j / 2];
    }
    kron = kron * h;
    gauss = gauss * h;
    return {kron, value_norm(kron - gauss)};
}

template <class T, class F>
T adapt(F& f, double a, double b, double tol, int depth, int max_depth, const T& whole,
        double err) {
    if (err <= tol || depth >= max_depth || b - a < 1e-15 * (1.0 + std::abs(a))) return whole;
    const double m = 0.5 * (a + b);
    auto [left, el] = gk15<T>(f, a, m);
    auto [right, er] = gk15<T>(f, m, b);
    return adapt<T>(f, a, m, 0.5 * tol, depth + 1, max_depth, left, el) +
           adapt<T>(f, m, b, 0.5 * tol, depth + 1, max_depth, right, er);
}
}  // namespace detail

/**
 * Adaptive Gauss-Kronrod integral of f over [a, b] to absolute tolerance `tol`.
 * T needs +, scalar * and a max-component norm (double, Vec2, Mat2).
 */
template <class T, class F>
T integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 40) {
    auto [whole, err] = detail::gk15<T>(f, a, b);
    return detail::adapt<T>(f, a, b, tol, 0, max_depth, whole, err);
}

/// Adaptive integral over consecutive breakpoints (sorted, deduplicated by the caller).
template <class T, class F>
T integrate_pieces(F&& f, const std::vector<double>& breaks, double tol, int max_depth = 40) {
    T total{};
    if (breaks.size() < 2) return total;
    const double share = tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] > breaks[i]) {
            total = total + integrate_adaptive<T>(f, breaks[i], breaks[i + 1], share, max_depth);
        }
    }
    return total;
}

}  // namespace vortexlab::quad

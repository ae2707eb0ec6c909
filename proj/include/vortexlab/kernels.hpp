#pragma once
/**
 * @file kernels.hpp
 * @brief Biot-Savart kernel, fundamental solution, smooth cutoffs and
 *        mollifiers, principal-value transforms and kernel-norm estimators.
 *
 * K(x) = x^perp / (2 pi |x|^2) recovers u = K * omega for decaying planar
 * flows. Its Jacobian is symmetric and traceless off the origin, and its
 * angular mean over any circle vanishes, which is what makes the principal
 * value of grad K against a bounded density exist.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vortexlab/geometry.hpp"
#include "vortexlab/quadrature.hpp"

namespace vortexlab {

class SingularityError : public std::domain_error {
public:
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

class PvNonConvergenceError : public std::runtime_error {
public:
    explicit PvNonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void require_nonzero(const Vec2& x, const char* op) {
    if (x.x == 0.0 && x.y == 0.0) throw SingularityError(std::string(op) + ": evaluated at the origin");
}
}  // namespace detail

inline Vec2 biot_savart_kernel(const Vec2& x) {
    detail::require_nonzero(x, "biot_savart_kernel");
    return x.perp() / (kTwoPi * x.norm2());
}

/// F(x) = log|x| / (2 pi), so that K = grad^perp F.
inline double fundamental_solution(const Vec2& x) {
    detail::require_nonzero(x, "fundamental_solution");
    return std::log(x.norm()) / kTwoPi;
}

/// Jacobian of K: (1 / (2 pi |x|^4)) [[2 x1 x2, x2^2 - x1^2], [x2^2 - x1^2, -2 x1 x2]].
inline Mat2 grad_biot_savart(const Vec2& x) {
    detail::require_nonzero(x, "grad_biot_savart");
    const double r2 = x.norm2();
    const double s = 1.0 / (kTwoPi * r2 * r2);
    const double off = (x.y * x.y - x.x * x.x) * s;
    return {2.0 * x.x * x.y * s, off, off, -2.0 * x.x * x.y * s};
}

/**
 * Radial cutoff a: a = 1 for |x| <= inner_radius, a = 0 for |x| >= 2 inner_radius,
 * joined by the C-infinity monotone bridge psi(t) = f(1-t) / (f(1-t) + f(t)),
 * f(t) = exp(-1/t), with t = |x| / inner_radius - 1.
 */
struct CutoffProfile {
    double inner_radius{1.0};

    /// Bridge value at normalised radius s = |x| / inner_radius.
    static double bridge(double s) {
        if (s <= 1.0) return 1.0;
        if (s >= 2.0) return 0.0;
        const double t = s - 1.0;
        const double a = std::exp(-1.0 / (1.0 - t));
        const double b = std::exp(-1.0 / t);
        return a / (a + b);
    }
    /// d bridge / ds.
    static double bridge_derivative(double s) {
        if (s <= 1.0 || s >= 2.0) return 0.0;
        const double t = s - 1.0;
        const double a = std::exp(-1.0 / (1.0 - t));
        const double b = std::exp(-1.0 / t);
        const double sum = a + b;
        return -a * b * (1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t)) / (sum * sum);
    }

    double value(double radius) const { return bridge(radius / inner_radius); }
    double derivative(double radius) const {
        return bridge_derivative(radius / inner_radius) / inner_radius;
    }
};

/// a_r(x) = a(x / r).
inline double radial_cutoff(const CutoffProfile& profile, double r, const Vec2& x) {
    if (!(r > 0.0)) throw std::invalid_argument("radial_cutoff: r must be positive");
    return profile.value(x.norm() / r);
}

inline Vec2 radial_cutoff_gradient(const CutoffProfile& profile, double r, const Vec2& x) {
    if (!(r > 0.0)) throw std::invalid_argument("radial_cutoff_gradient: r must be positive");
    const double rho = x.norm();
    if (rho == 0.0) return {};
    return x * (profile.derivative(rho / r) / (r * rho));
}

/// mu_rh = a_r (1 - a_h); requires 0 < 2h < r.
inline double annular_cutoff(double r, double h, const Vec2& x, const CutoffProfile& profile = {}) {
    if (!(h > 0.0) || !(2.0 * h < r)) {
        throw std::invalid_argument("annular_cutoff: requires 0 < 2h < r");
    }
    return radial_cutoff(profile, r, x) * (1.0 - radial_cutoff(profile, h, x));
}

inline Vec2 annular_cutoff_gradient(double r, double h, const Vec2& x,
                                    const CutoffProfile& profile = {}) {
    if (!(h > 0.0) || !(2.0 * h < r)) {
        throw std::invalid_argument("annular_cutoff_gradient: requires 0 < 2h < r");
    }
    const double ar = radial_cutoff(profile, r, x), ah = radial_cutoff(profile, h, x);
    return radial_cutoff_gradient(profile, r, x) * (1.0 - ah) -
           radial_cutoff_gradient(profile, h, x) * ar;
}

/// grad(a_r K)(z) = a_r grad K + K (grad a_r)^T.
inline Mat2 cutoff_biot_savart_gradient(const CutoffProfile& profile, double r, const Vec2& z) {
    const double a = radial_cutoff(profile, r, z);
    Mat2 out = Mat2::outer(biot_savart_kernel(z), radial_cutoff_gradient(profile, r, z));
    if (a > 0.0) out += grad_biot_savart(z) * a;
    return out;
}

/**
 * Radial bump rho(x) = c exp(-1 / (1 - (|x|/R)^2)) on |x| < R, with c fixed
 * numerically so that the total mass is 1.
 */
class MollifierProfile {
public:
    explicit MollifierProfile(double support_radius = 1.0) : support_radius_(support_radius) {
        if (!(support_radius > 0.0)) throw std::invalid_argument("MollifierProfile: radius must be positive");
        const double unit_mass = quad::integrate_adaptive<double>(
            [](double s) { return kTwoPi * s * unnormalized(s); }, 0.0, 1.0, 1e-15);
        scale_ = 1.0 / (unit_mass * support_radius * support_radius);
    }

    double support_radius() const { return support_radius_; }

    double value(const Vec2& x) const { return scale_ * unnormalized(x.norm() / support_radius_); }
    double radial_value(double rho) const { return scale_ * unnormalized(rho / support_radius_); }

    Vec2 gradient(const Vec2& x) const {
        const double rho = x.norm();
        const double s = rho / support_radius_;
        if (rho == 0.0 || s >= 1.0) return {};
        const double q = 1.0 - s * s;
        const double ds = -unnormalized(s) * 2.0 * s / (q * q);
        return x * (scale_ * ds / (support_radius_ * rho));
    }

    /// rho_eps(x) = eps^-2 rho(x / eps).
    double scaled(double eps, const Vec2& x) const { return value(x / eps) / (eps * eps); }

private:
    static double unnormalized(double s) {
        if (s >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - s * s));
    }

    double support_radius_;
    double scale_{1.0};
};

/// Polar quadrature resolution for mollification.
struct MollifyOptions {
    int angular{64};
    int radial_panels{8};
    int order{16};
};

/// (rho_eps * f)(x) by polar quadrature over the support disk of rho_eps.
template <class F>
double mollify(F&& field, const MollifierProfile& profile, double eps, const Vec2& x,
               const MollifyOptions& opts = {}) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
    const double radius = eps * profile.support_radius();
    const auto pts = quad::composite(0.0, radius, opts.radial_panels, opts.order);
    const double dtheta = kTwoPi / opts.angular;
    double total = 0.0;
    for (int k = 0; k < opts.angular; ++k) {
        const double theta = (k + 0.5) * dtheta;
        const Vec2 e{std::cos(theta), std::sin(theta)};
        double ray = 0.0;
        for (const auto& p : pts) {
            const double f = field(x + e * p.x);
            if (!std::isfinite(f)) {
                throw std::runtime_error("mollify: field evaluation failed inside the support");
            }
            ray += p.w * p.x * profile.radial_value(p.x / eps) * f;
        }
        total += ray;
    }
    return total * dtheta / (eps * eps);
}

/// Polar grid and exclusion-radius schedule for principal-value transforms.
struct PvOptions {
    double outer_radius{4.0};
    int angular{256};
    int order{16};
    /// h_k = h0 2^-k for k = 0 .. levels-1.
    double h0{1e-3};
    int levels{5};
    /// Radii where the integrand is not smooth in |x - y| (split points).
    std::vector<double> radial_breaks{};
    /// Upper bound on a radial panel width.
    double max_panel{0.25};
    /// Cauchy criterion: |I(h_last) - I(h_prev)| <= cauchy_tol (1 + |I|).
    double cauchy_tol{1e-4};
};

template <class T>
struct PvResult {
    T value{};
    std::vector<double> radii;
    std::vector<T> sequence;
    double last_difference{0.0};
};

namespace detail {
template <class L, class F>
auto shell_integral(L& kernel, F& f, const Vec2& x, const std::vector<Vec2>& dirs,
                    const std::vector<quad::Point>& pts, double dtheta) {
    using T = decltype(kernel(x, x) * 1.0);
    T total{};
    for (const auto& e : dirs) {
        T ray{};
        for (const auto& p : pts) {
            const Vec2 y = x + e * p.x;
            ray = ray + kernel(x, y) * (p.w * p.x * f(y));
        }
        total = total + ray;
    }
    return total * dtheta;
}

inline std::vector<quad::Point> radial_points(double lo, double hi, const PvOptions& opts) {
    std::vector<double> cuts{lo};
    for (double b : opts.radial_breaks) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    std::vector<quad::Point> pts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto piece = quad::graded(cuts[i], cuts[i + 1], opts.order, 2.0, opts.max_panel);
        pts.insert(pts.end(), piece.begin(), piece.end());
    }
    return pts;
}
}  // namespace detail

/**
 * PV integral of L(x, y) f(y) dy over h < |x - y| < outer_radius for each
 * exclusion radius h_k, then linear extrapolation in h to h = 0 from the two
 * smallest radii. The angular rule is the periodic trapezoid rule, which
 * integrates the zero-mean angular harmonics of grad K exactly.
 *
 * Throws PvNonConvergenceError when successive values fail the Cauchy test.
 */
template <class L, class F>
auto pv_transform(L&& kernel, F&& f, const Vec2& x, const PvOptions& opts = {})
    -> PvResult<decltype(kernel(x, x) * 1.0)> {
    using T = decltype(kernel(x, x) * 1.0);
    if (opts.levels < 2) throw std::invalid_argument("pv_transform: need at least two exclusion radii");
    if (!(opts.h0 > 0.0) || !(opts.h0 < opts.outer_radius)) {
        throw std::invalid_argument("pv_transform: exclusion radii must lie in (0, outer_radius)");
    }
    std::vector<Vec2> dirs(opts.angular);
    const double dtheta = kTwoPi / opts.angular;
    for (int k = 0; k < opts.angular; ++k) {
        const double theta = (k + 0.5) * dtheta;
        dirs[k] = {std::cos(theta), std::sin(theta)};
    }

    PvResult<T> out;
    double h = opts.h0;
    T running = detail::shell_integral(kernel, f, x, dirs,
                                       detail::radial_points(h, opts.outer_radius, opts), dtheta);
    out.radii.push_back(h);
    out.sequence.push_back(running);
    for (int k = 1; k < opts.levels; ++k) {
        const double h_next = 0.5 * h;
        std::vector<quad::Point> shell;
        quad::append_panel(shell, h_next, h, opts.order);
        running = running + detail::shell_integral(kernel, f, x, dirs, shell, dtheta);
        h = h_next;
        out.radii.push_back(h);
        out.sequence.push_back(running);
    }
    const std::size_t n = out.sequence.size();
    const T& last = out.sequence[n - 1];
    const T& prev = out.sequence[n - 2];
    out.last_difference = quad::detail::value_norm(last - prev);
    // Line through (h_{n-2}, I_{n-2}) and (h_{n-1}, I_{n-1}) evaluated at h = 0.
    out.value = last * 2.0 - prev;
    if (!(out.last_difference <= opts.cauchy_tol * (1.0 + quad::detail::value_norm(last)))) {
        throw PvNonConvergenceError("pv_transform: successive exclusion radii differ by " +
                                    std::to_string(out.last_difference));
    }
    return out;
}

/// A kernel with its nominal singular order (power of |x - y| in its bound).
template <class Eval>
struct KernelSample {
    Eval evaluator;
    int singular_order{2};
};

/**
 * Discrete ||L||_* = sup |x-y|^2 |L(x,y)| + |x-y|^3 |grad_x L(x,y)| over the
 * supplied pairs; grad_x L by central differences with step fd_rel |x - y|.
 * |.| is the max-component norm of the kernel value.
 */
template <class L>
double kernel_star_norm(L&& kernel, const std::vector<std::pair<Vec2, Vec2>>& pairs,
                        double fd_rel = 1e-5) {
    double best = 0.0;
    for (const auto& [x, y] : pairs) {
        const double d = (x - y).norm();
        if (d == 0.0) continue;
        const double step = fd_rel * d;
        const double value = quad::detail::value_norm(kernel(x, y) * 1.0);
        const auto dx = (kernel(x + Vec2{step, 0.0}, y) - kernel(x - Vec2{step, 0.0}, y)) * (0.5 / step);
        const auto dy = (kernel(x + Vec2{0.0, step}, y) - kernel(x - Vec2{0.0, step}, y)) * (0.5 / step);
        const double grad = std::max(quad::detail::value_norm(dx), quad::detail::value_norm(dy));
        best = std::max(best, d * d * value + d * d * d * grad);
    }
    return best;
}

}  // namespace vortexlab

#pragma once
/**
 * @file fields.hpp
 * @brief Vorticity models and the velocity / velocity-gradient evaluators.
 *
 * Four model kinds:
 *   - radial:  omega(x) = g(|x - c|); stationary, closed-form u and grad u.
 *   - patch:   omega = amplitude on a polygonal region; contour-reduced
 *              u(x) = -(amp / 2 pi) oint log|x - y| t(y) ds(y), integrated
 *              exactly segment by segment.
 *   - shear:   omega(x) = W(x2) on the strip c <= x2 <= d with zero mean W;
 *              u = (-int_c^x2 W, 0).
 *   - smooth:  analytic omega with an effective support disk; u by polar
 *              quadrature, grad u = (omega/2) J + PV grad K * omega.
 *
 * Every kind except shear also has an independent "quadrature" route that
 * integrates along rays from the target point, splitting each ray at the
 * jumps of omega and the angle range at the directions where that jump
 * structure changes.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vortexlab/geometry.hpp"
#include "vortexlab/holder.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/quadrature.hpp"

namespace vortexlab {

class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

/// Radial vorticity profile g with its first moment int_0^r rho g(rho) d rho.
class RadialProfile {
public:
    /// g = amplitude on [r_inner, r_outer), 0 elsewhere.
    static RadialProfile indicator(double r_inner, double r_outer, double amplitude = 1.0) {
        if (!(r_inner >= 0.0 && r_outer > r_inner)) {
            throw ModelError("RadialProfile::indicator: need 0 <= r_inner < r_outer");
        }
        RadialProfile p;
        p.g_ = [=](double r) { return (r >= r_inner && r < r_outer) ? amplitude : 0.0; };
        p.moment_ = [=](double r) {
            const double hi = std::clamp(r, r_inner, r_outer);
            return 0.5 * amplitude * (hi * hi - r_inner * r_inner);
        };
        p.breaks_ = r_inner > 0.0 ? std::vector<double>{r_inner, r_outer} : std::vector<double>{r_outer};
        p.support_ = r_outer;
        p.sup_ = std::abs(amplitude);
        return p;
    }

    /// g = amplitude exp(-r^2 / sigma^2) cut off at `support`, with the exact moment.
    static RadialProfile gaussian(double sigma, double amplitude, double support) {
        if (!(sigma > 0.0 && support > 0.0)) throw ModelError("RadialProfile::gaussian: need sigma, support > 0");
        RadialProfile p;
        p.g_ = [=](double r) { return r <= support ? amplitude * std::exp(-r * r / (sigma * sigma)) : 0.0; };
        p.moment_ = [=](double r) {
            const double hi = std::min(r, support);
            return 0.5 * amplitude * sigma * sigma * -std::expm1(-hi * hi / (sigma * sigma));
        };
        p.support_ = support;
        p.sup_ = std::abs(amplitude);
        return p;
    }

    /// Piecewise-smooth g supported in [0, support]; `breaks` are its jump radii.
    static RadialProfile piecewise(std::function<double(double)> g, std::vector<double> breaks,
                                   double support) {
        if (!(support > 0.0)) throw ModelError("RadialProfile::piecewise: support must be positive");
        RadialProfile p;
        p.g_ = [g, support](double r) { return r <= support ? g(r) : 0.0; };
        std::sort(breaks.begin(), breaks.end());
        p.breaks_ = breaks;
        p.support_ = support;
        std::vector<double> cuts{0.0};
        for (double b : breaks) {
            if (b > 0.0 && b < support) cuts.push_back(b);
        }
        cuts.push_back(support);
        auto gg = p.g_;
        p.moment_ = [gg, cuts](double r) {
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < cuts.size() && cuts[i] < r; ++i) {
                const double hi = std::min(r, cuts[i + 1]);
                for (const auto& q : quad::composite(cuts[i], hi, 8, 16)) total += q.w * q.x * gg(q.x);
            }
            return total;
        };
        double sup = 0.0;
        for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(g(support * i / 4000.0)));
        p.sup_ = sup;
        return p;
    }

    double operator()(double r) const { return g_(r); }
    double moment(double r) const { return moment_(r); }
    const std::vector<double>& breaks() const { return breaks_; }
    double support() const { return support_; }
    double sup() const { return sup_; }

private:
    RadialProfile() = default;
    std::function<double(double)> g_;
    std::function<double(double)> moment_;
    std::vector<double> breaks_;
    double support_{0.0};
    double sup_{0.0};
};

/// Zero-mean shear profile W on [c, d] with its primitive P(s) = int_c^s W.
class ShearProfile {
public:
    /// W(s) = amplitude sin(2 pi modes (s - c) / (d - c)).
    static ShearProfile sine(double c, double d, double amplitude = 1.0, int modes = 1) {
        if (!(d > c)) throw ModelError("ShearProfile::sine: need c < d");
        if (modes < 1) throw ModelError("ShearProfile::sine: modes must be positive");
        const double k = kTwoPi * modes / (d - c);
        ShearProfile p;
        p.c_ = c;
        p.d_ = d;
        p.w_ = [=](double s) { return amplitude * std::sin(k * (s - c)); };
        p.primitive_ = [=](double s) {
            const double t = std::clamp(s, c, d);
            return amplitude * (1.0 - std::cos(k * (t - c))) / k;
        };
        return p;
    }

    /// General W on [c, d]; construction fails unless |int_c^d W| <= tol.
    static ShearProfile general(std::function<double(double)> w, double c, double d,
                                double tol = 1e-10) {
        if (!(d > c)) throw ModelError("ShearProfile::general: need c < d");
        ShearProfile p;
        p.c_ = c;
        p.d_ = d;
        p.w_ = w;
        p.primitive_ = [w, c, d](double s) {
            const double t = std::clamp(s, c, d);
            if (t <= c) return 0.0;
            double total = 0.0;
            for (const auto& q : quad::composite(c, t, 16, 16)) total += q.w * w(q.x);
            return total;
        };
        const double mean = p.primitive_(d);
        if (std::abs(mean) > tol) {
            throw ModelError("ShearProfile: W must integrate to zero over [c, d] (got " +
                             std::to_string(mean) + ")");
        }
        return p;
    }

    double c() const { return c_; }
    double d() const { return d_; }
    double operator()(double s) const { return (s >= c_ && s <= d_) ? w_(s) : 0.0; }
    double primitive(double s) const { return primitive_(s); }

private:
    ShearProfile() = default;
    double c_{0.0}, d_{1.0};
    std::function<double(double)> w_;
    std::function<double(double)> primitive_;
};

struct RadialModel {
    Vec2 center{};
    RadialProfile profile = RadialProfile::indicator(0.0, 1.0);
};

struct PatchModel {
    /// Counter-clockwise boundary polygon.
    std::vector<Vec2> boundary;
    double amplitude{1.0};
};

struct ShearModel {
    ShearProfile profile = ShearProfile::sine(-1.0, 1.0);
};

struct SmoothModel {
    std::function<double(const Vec2&)> omega;
    Vec2 center{};
    /// omega is negligible (below double precision of its peak) outside this disk.
    double support_radius{1.0};
    /// Length scale on which omega varies; sets the quadrature panel width.
    double length_scale{1.0};
};

/// Immutable description of omega_0.
class VorticityModel {
public:
    using Kind = std::variant<RadialModel, PatchModel, ShearModel, SmoothModel>;

    static VorticityModel radial(RadialProfile profile, Vec2 center = {}) {
        return VorticityModel(RadialModel{center, std::move(profile)});
    }
    static VorticityModel circular_patch(double radius = 1.0, double amplitude = 1.0, Vec2 center = {}) {
        return radial(RadialProfile::indicator(0.0, radius, amplitude), center);
    }
    static VorticityModel patch(std::vector<Vec2> boundary, double amplitude = 1.0) {
        ClosedCurve curve(boundary);  // validates simplicity
        if (curve.signed_area() < 0.0) std::reverse(boundary.begin(), boundary.end());
        return VorticityModel(PatchModel{std::move(boundary), amplitude});
    }
    static VorticityModel shear(ShearProfile profile) { return VorticityModel(ShearModel{std::move(profile)}); }
    static VorticityModel smooth(std::function<double(const Vec2&)> omega, Vec2 center,
                                 double support_radius, double length_scale) {
        if (!(support_radius > 0.0 && length_scale > 0.0)) {
            throw ModelError("smooth model: support radius and length scale must be positive");
        }
        return VorticityModel(SmoothModel{std::move(omega), center, support_radius, length_scale});
    }
    /// amplitude exp(-|x - c|^2 / sigma^2).
    static VorticityModel gaussian(double sigma, double amplitude = 1.0, Vec2 center = {}) {
        if (!(sigma > 0.0)) throw ModelError("gaussian model: sigma must be positive");
        return smooth([=](const Vec2& x) { return amplitude * std::exp(-(x - center).norm2() / (sigma * sigma)); },
                      center, 6.5 * sigma, sigma);
    }
    /// The zero vorticity field.
    static VorticityModel zero() {
        return smooth([](const Vec2&) { return 0.0; }, {}, 1.0, 1.0);
    }

    const Kind& kind() const { return kind_; }
    bool is_radial() const { return std::holds_alternative<RadialModel>(kind_); }
    bool is_patch() const { return std::holds_alternative<PatchModel>(kind_); }
    bool is_shear() const { return std::holds_alternative<ShearModel>(kind_); }
    bool is_smooth() const { return std::holds_alternative<SmoothModel>(kind_); }

    std::string kind_name() const {
        static const char* names[] = {"radial", "patch", "shear", "smooth"};
        return names[kind_.index()];
    }

    /// Characteristic diameter of the vorticity support (strip width for shear).
    double diameter() const {
        return std::visit(
            [](const auto& m) -> double {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, RadialModel>) {
                    return 2.0 * m.profile.support();
                } else if constexpr (std::is_same_v<M, PatchModel>) {
                    double d = 0.0;
                    for (const auto& a : m.boundary)
                        for (const auto& b : m.boundary) d = std::max(d, (a - b).norm());
                    return d;
                } else if constexpr (std::is_same_v<M, ShearModel>) {
                    return m.profile.d() - m.profile.c();
                } else {
                    return 2.0 * m.support_radius;
                }
            },
            kind_);
    }

private:
    explicit VorticityModel(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

namespace detail {

inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > x.y) != (b.y > x.y)) {
            const double xc = a.x + (x.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x.x < xc) inside = !inside;
        }
    }
    return inside;
}

inline double distance_to_segment(const Vec2& x, const Vec2& p, const Vec2& q) {
    const Vec2 d = q - p;
    const double t = std::clamp(dot(x - p, d) / d.norm2(), 0.0, 1.0);
    return (x - (p + d * t)).norm();
}

inline double distance_to_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        best = std::min(best, distance_to_segment(x, poly[i], poly[(i + 1) % poly.size()]));
    }
    return best;
}


}  // namespace detail

/**
 * Exact velocity and velocity gradient induced by a uniform-vorticity polygon.
 * Per straight segment P -> Q with unit tangent t, n = t^perp, a = (x-P).t,
 * b = (x-P).n and phi the signed angle subtended at x:
 *   int log|x-y| ds        = (L-a) log|Q-x| + a log|P-x| - L + b phi,
 *   int (x-y)/|x-y|^2 ds   = -t log(|Q-x|/|P-x|) + n phi.
 */
inline Vec2 polygon_velocity(const std::vector<Vec2>& poly, double amplitude, const Vec2& x) {
    const std::size_t n = poly.size();
    // Per-node offsets and log-distances, shared by the two adjacent segments.
    thread_local std::vector<double> logr;
    logr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (poly[i] - x).norm();
        logr[i] = r > 0.0 ? std::log(r) : 0.0;
    }
    Vec2 sum{};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + 1 == n ? 0 : i + 1;
        const Vec2 pu = poly[i] - x, qu = poly[j] - x;
        const Vec2 seg = qu - pu;
        const double len = seg.norm();
        const Vec2 t = seg / len;
        const double a = -dot(pu, t), b = -dot(pu, t.perp());
        const double phi = std::atan2(cross(pu, qu), dot(pu, qu));
        const double la = len - a;
        const double integral = (la == 0.0 ? 0.0 : la * logr[j]) + (a == 0.0 ? 0.0 : a * logr[i]) - len + b * phi;
        sum += t * integral;
    }
    return sum * (-amplitude / kTwoPi);
}

inline Mat2 polygon_velocity_gradient(const std::vector<Vec2>& poly, double amplitude, const Vec2& x) {
    const std::size_t n = poly.size();
    thread_local std::vector<double> logr;
    logr.resize(n);
    for (std::size_t i = 0; i < n; ++i) logr[i] = std::log((poly[i] - x).norm());
    Mat2 sum{};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + 1 == n ? 0 : i + 1;
        const Vec2 pu = poly[i] - x, qu = poly[j] - x;
        const Vec2 seg = qu - pu;
        const Vec2 t = seg / seg.norm();
        const double phi = std::atan2(cross(pu, qu), dot(pu, qu));
        const Vec2 v = t * (logr[i] - logr[j]) + t.perp() * phi;
        sum += Mat2::outer(t, v);
    }
    return sum * (-amplitude / kTwoPi);
}

inline double vorticity(const VorticityModel& model, const Vec2& x) {
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                return m.profile((x - m.center).norm());
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                return detail::point_in_polygon(m.boundary, x) ? m.amplitude : 0.0;
            } else if constexpr (std::is_same_v<M, ShearModel>) {
                return m.profile(x.y);
            } else {
                return m.omega(x);
            }
        },
        model.kind());
}

/// Distance from x to the set where omega jumps (infinity for smooth models).
inline double distance_to_jump_set(const VorticityModel& model, const Vec2& x) {
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                const double r = (x - m.center).norm();
                double best = std::numeric_limits<double>::infinity();
                for (double b : m.profile.breaks()) best = std::min(best, std::abs(r - b));
                return best;
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                return detail::distance_to_polygon(m.boundary, x);
            } else if constexpr (std::is_same_v<M, ShearModel>) {
                const double jc = std::abs(m.profile(m.profile.c())), jd = std::abs(m.profile(m.profile.d()));
                double best = std::numeric_limits<double>::infinity();
                if (jc > 0.0) best = std::min(best, std::abs(x.y - m.profile.c()));
                if (jd > 0.0) best = std::min(best, std::abs(x.y - m.profile.d()));
                return best;
            } else {
                return std::numeric_limits<double>::infinity();
            }
        },
        model.kind());
}

enum class Route {
    /// Closed form, contour reduction or the kind's primary quadrature.
    automatic,
    /// Independent ray quadrature (not available for shear).
    quadrature,
};

struct FieldOptions {
    Route route{Route::automatic};
    /// Boundary-proximity flag radius, relative to the model diameter.
    double snap_relative{1e-6};
    /// Absolute tolerance of the adaptive angular integration.
    double angular_tol{1e-11};
    /// PV settings for smooth models (outer radius is filled in per target).
    PvOptions pv{};
};

struct GradientEval {
    Mat2 value{};
    /// x lies within the snap tolerance of a jump of omega.
    bool near_boundary{false};
};

namespace detail {

/// Ray structure of omega seen from a target x.
struct RayGeometry {
    double extent{0.0};
    std::vector<double> angle_breaks;  // in [0, 2 pi]
};

/// Jump radii plus the support edge, where g may lose smoothness.
inline std::vector<double> radial_cuts(const RadialProfile& p) {
    auto out = p.breaks();
    if (std::find(out.begin(), out.end(), p.support()) == out.end()) out.push_back(p.support());
    return out;
}

inline void add_angle(std::vector<double>& out, double theta) {
    theta = std::fmod(theta, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    out.push_back(theta);
}

inline RayGeometry ray_geometry(const VorticityModel& model, const Vec2& x) {
    RayGeometry g;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                const Vec2 dc = m.center - x;
                const double d = dc.norm();
                g.extent = d + m.profile.support();
                const double toward = std::atan2(dc.y, dc.x);
                for (double rk : radial_cuts(m.profile)) {
                    if (rk < d && d > 0.0) {
                        const double half = std::asin(rk / d);
                        add_angle(g.angle_breaks, toward + half);
                        add_angle(g.angle_breaks, toward - half);
                    }
                }
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                for (const auto& p : m.boundary) {
                    g.extent = std::max(g.extent, (p - x).norm());
                    add_angle(g.angle_breaks, std::atan2(p.y - x.y, p.x - x.x));
                }
            } else if constexpr (std::is_same_v<M, SmoothModel>) {
                const Vec2 dc = m.center - x;
                const double d = dc.norm();
                g.extent = d + m.support_radius;
                // Far from the support only a cone of rays sees omega.
                if (d > m.support_radius) {
                    const double toward = std::atan2(dc.y, dc.x);
                    const double half = std::asin(m.support_radius / d);
                    for (double a : {toward - half, toward, toward + half}) add_angle(g.angle_breaks, a);
                }
            } else {
                throw ModelError("quadrature route is not available for shear models");
            }
        },
        model.kind());
    g.angle_breaks.push_back(0.0);
    g.angle_breaks.push_back(kTwoPi);
    std::sort(g.angle_breaks.begin(), g.angle_breaks.end());
    g.angle_breaks.erase(std::unique(g.angle_breaks.begin(), g.angle_breaks.end(),
                                     [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                         g.angle_breaks.end());
    return g;
}

/// Distances along x + rho e (0 < rho < extent) where omega jumps.
inline std::vector<double> ray_breaks(const VorticityModel& model, const Vec2& x, const Vec2& e,
                                      double extent) {
    std::vector<double> out;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                const Vec2 w = x - m.center;
                const double bq = dot(w, e), cq0 = w.norm2();
                for (double rk : radial_cuts(m.profile)) {
                    const double disc = bq * bq - (cq0 - rk * rk);
                    if (disc <= 0.0) continue;
                    const double s = std::sqrt(disc);
                    for (double rho : {-bq - s, -bq + s}) {
                        if (rho > 0.0 && rho < extent) out.push_back(rho);
                    }
                }
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                const std::size_t n = m.boundary.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec2& p = m.boundary[i];
                    const Vec2 d = m.boundary[(i + 1) % n] - p;
                    const double den = cross(e, d);
                    if (den == 0.0) continue;
                    const Vec2 w = p - x;
                    const double rho = cross(w, d) / den;
                    const double s = cross(w, e) / den;
                    if (s >= 0.0 && s <= 1.0 && rho > 0.0 && rho < extent) out.push_back(rho);
                }
            }
        },
        model.kind());
    std::sort(out.begin(), out.end());
    return out;
}

inline double panel_width(const VorticityModel& model) {
    if (const auto* s = std::get_if<SmoothModel>(&model.kind())) return 0.5 * s->length_scale;
    return 1e300;
}

/// Quadrature points on (0, extent) split at the jumps of omega along the ray.
/// Pieces starting away from the origin are graded when `graded_from_zero`.
inline std::vector<quad::Point> ray_points(const std::vector<double>& jumps, double extent,
                                           double width, bool weight_inverse_rho) {
    std::vector<double> cuts{0.0};
    cuts.insert(cuts.end(), jumps.begin(), jumps.end());
    cuts.push_back(extent);
    std::vector<quad::Point> pts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        if (weight_inverse_rho && lo > 0.0) {
            auto piece = quad::graded(lo, hi, 16, 2.0, width);
            pts.insert(pts.end(), piece.begin(), piece.end());
        } else {
            const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
            const int capped = std::min(panels, 4096);
            for (int p = 0; p < capped; ++p) {
                quad::append_panel(pts, lo + (hi - lo) * p / capped, lo + (hi - lo) * (p + 1) / capped, 16);
            }
        }
    }
    return pts;
}

/// (1 / 2 pi) int S(theta) int_0^R (omega(x + rho e) - omega(x)) / rho d rho d theta,
/// the PV integral of grad K against omega in polar form around x.
inline Mat2 pv_ray_quadrature(const VorticityModel& model, const Vec2& x, double omega_x, double tol) {
    const RayGeometry geom = ray_geometry(model, x);
    const double width = panel_width(model);
    auto integrand = [&](double theta) -> Mat2 {
        const Vec2 e{std::cos(theta), std::sin(theta)};
        const auto jumps = ray_breaks(model, x, e, geom.extent);
        double phi = 0.0;
        for (const auto& p : ray_points(jumps, geom.extent, width, true)) {
            phi += p.w * (vorticity(model, x + e * p.x) - omega_x) / p.x;
        }
        const double s2 = std::sin(2.0 * theta), c2 = std::cos(2.0 * theta);
        return Mat2{s2, -c2, -c2, -s2} * phi;
    };
    return quad::integrate_pieces<Mat2>(integrand, geom.angle_breaks, tol) / kTwoPi;
}

/// -(1 / 2 pi) int e^perp int_0^R omega(x + rho e) d rho d theta.
inline Vec2 velocity_ray_quadrature(const VorticityModel& model, const Vec2& x, double tol) {
    const RayGeometry geom = ray_geometry(model, x);
    const double width = panel_width(model);
    auto integrand = [&](double theta) -> Vec2 {
        const Vec2 e{std::cos(theta), std::sin(theta)};
        const auto jumps = ray_breaks(model, x, e, geom.extent);
        double psi = 0.0;
        for (const auto& p : ray_points(jumps, geom.extent, width, false)) {
            psi += p.w * vorticity(model, x + e * p.x);
        }
        return e.perp() * psi;
    };
    return quad::integrate_pieces<Vec2>(integrand, geom.angle_breaks, tol) * (-1.0 / kTwoPi);
}

inline Mat2 radial_sym_structure(const Vec2& z) {
    const double off = z.y * z.y - z.x * z.x;
    return {2.0 * z.x * z.y, off, off, -2.0 * z.x * z.y};
}

/// (1 / r^2) [[-z1 z2, -z2^2], [z1^2, z1 z2]]: the corrector matrix for Y = e_theta.
inline Mat2 tangential_structure(const Vec2& z) {
    const double r2 = z.norm2();
    return Mat2{-z.x * z.y, -z.y * z.y, z.x * z.x, z.x * z.y} / r2;
}

}  // namespace detail

/**
 * K * q for a smooth scalar density q supported in the disk (center, support),
 * by polar quadrature around x with panels of width `length_scale / 2`.
 */
template <class Q>
Vec2 biot_savart_convolution(Q&& q, const Vec2& x, const Vec2& center, double support,
                             double length_scale, double tol = 1e-11) {
    const double extent = (center - x).norm() + support;
    const auto pts = detail::ray_points({}, extent, 0.5 * length_scale, false);
    auto integrand = [&](double theta) -> Vec2 {
        const Vec2 e{std::cos(theta), std::sin(theta)};
        double psi = 0.0;
        for (const auto& p : pts) psi += p.w * q(x + e * p.x);
        return e.perp() * psi;
    };
    return quad::integrate_adaptive<Vec2>(integrand, 0.0, kTwoPi, tol) * (-1.0 / kTwoPi);
}

inline Vec2 velocity(const VorticityModel& model, const Vec2& x, const FieldOptions& opts = {}) {
    if (opts.route == Route::quadrature) {
        if (model.is_shear()) throw ModelError("velocity: no quadrature route for shear models");
        return detail::velocity_ray_quadrature(model, x, opts.angular_tol);
    }
    return std::visit(
        [&](const auto& m) -> Vec2 {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                const Vec2 z = x - m.center;
                const double r2 = z.norm2();
                if (r2 == 0.0) return {};
                return z.perp() * (m.profile.moment(std::sqrt(r2)) / r2);
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                return polygon_velocity(m.boundary, m.amplitude, x);
            } else if constexpr (std::is_same_v<M, ShearModel>) {
                return {-m.profile.primitive(x.y), 0.0};
            } else {
                return detail::velocity_ray_quadrature(model, x, opts.angular_tol);
            }
        },
        model.kind());
}

/// Symmetric part of grad u, PV int grad K(x - y) omega(y) dy; quadrature route
/// except for shear, where it is the closed form.
inline Mat2 pv_symmetric_part(const VorticityModel& model, const Vec2& x, const FieldOptions& opts = {}) {
    if (const auto* s = std::get_if<ShearModel>(&model.kind())) {
        const double w = s->profile(x.y);
        return {0.0, -0.5 * w, -0.5 * w, 0.0};
    }
    return detail::pv_ray_quadrature(model, x, vorticity(model, x), opts.angular_tol);
}

inline GradientEval grad_velocity(const VorticityModel& model, const Vec2& x, const FieldOptions& opts = {}) {
    GradientEval out;
    out.near_boundary = distance_to_jump_set(model, x) < opts.snap_relative * model.diameter();
    if (opts.route == Route::quadrature) {
        if (model.is_shear()) throw ModelError("grad_velocity: no quadrature route for shear models");
        const double w = vorticity(model, x);
        out.value = kJ * (0.5 * w) + detail::pv_ray_quadrature(model, x, w, opts.angular_tol);
        return out;
    }
    out.value = std::visit(
        [&](const auto& m) -> Mat2 {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RadialModel>) {
                const Vec2 z = x - m.center;
                const double r2 = z.norm2();
                if (r2 == 0.0) return kJ * (0.5 * m.profile(0.0));
                const double r = std::sqrt(r2);
                const double g = m.profile(r);
                return detail::radial_sym_structure(z) * (m.profile.moment(r) / (r2 * r2)) +
                       Mat2{-z.x * z.y, -z.y * z.y, z.x * z.x, z.x * z.y} * (g / r2);
            } else if constexpr (std::is_same_v<M, PatchModel>) {
                return polygon_velocity_gradient(m.boundary, m.amplitude, x);
            } else if constexpr (std::is_same_v<M, ShearModel>) {
                return {0.0, -m.profile(x.y), 0.0, 0.0};
            } else {
                PvOptions pv = opts.pv;
                pv.outer_radius = (m.center - x).norm() + m.support_radius;
                pv.h0 = std::min(pv.h0, 1e-3 * m.length_scale);
                pv.max_panel = std::min(pv.max_panel, 0.25 * m.length_scale);
                const auto res = pv_transform([](const Vec2& a, const Vec2& b) { return grad_biot_savart(a - b); },
                                              m.omega, x, pv);
                return kJ * (0.5 * m.omega(x)) + res.value;
            }
        },
        model.kind());
    return out;
}

/// Vector field Y, e.g. Y_0 or its pushforward.
struct YField {
    std::function<Vec2(const Vec2&)> eval;
    std::string label;

    Vec2 operator()(const Vec2& x) const { return eval(x); }

    static YField constant(Vec2 v) {
        return {[v](const Vec2&) { return v; }, "constant"};
    }
    /// (x - c)^perp.
    static YField rotational(Vec2 center = {}) {
        return {[center](const Vec2& x) { return (x - center).perp(); }, "rotational"};
    }
    /// e_theta about c (zero at c).
    static YField unit_tangent(Vec2 center = {}) {
        return {[center](const Vec2& x) {
                    const Vec2 z = x - center;
                    const double r = z.norm();
                    return r > 0.0 ? z.perp() / r : Vec2{};
                },
                "unit_tangent"};
    }
};

/// Level-set function phi with its gradient; grad^perp phi is tangent to its level curves.
struct LevelSet {
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> gradient;

    /// phi = |x - c| - R.
    static LevelSet circle(Vec2 center, double radius) {
        return {[=](const Vec2& x) { return (x - center).norm() - radius; },
                [=](const Vec2& x) {
                    const Vec2 z = x - center;
                    const double r = z.norm();
                    return r > 0.0 ? z / r : Vec2{};
                }};
    }
    /// phi = sqrt((z1/a)^2 + (z2/b)^2) - 1, z = x - c.
    static LevelSet ellipse(Vec2 center, double a, double b) {
        return {[=](const Vec2& x) {
                    const Vec2 z = x - center;
                    return std::hypot(z.x / a, z.y / b) - 1.0;
                },
                [=](const Vec2& x) {
                    const Vec2 z = x - center;
                    const double s = std::hypot(z.x / a, z.y / b);
                    return s > 0.0 ? Vec2{z.x / (a * a * s), z.y / (b * b * s)} : Vec2{};
                }};
    }

    YField tangent_field() const {
        auto g = gradient;
        return {[g](const Vec2& x) { return g(x).perp(); }, "level_set_tangent"};
    }
};

struct IdentityEval {
    Vec2 lhs{};
    Vec2 rhs{};
    double residual{0.0};
};

struct IdentityOptions {
    FieldOptions field{};
    /// Step of the fourth-order central difference for div(omega Y), relative
    /// to the model's length scale.
    double fd_relative{1e-3};
    /// Integration window radius for shear models (no compact support).
    double shear_window{4.0};
};

/**
 * Both sides of
 *   (grad u) Y(x) = PV int grad K(x - y) [Y(x) - Y(y)] omega(y) dy + (K * div(omega Y))(x).
 * The left side uses grad_velocity; the right side uses pv_transform and a polar
 * quadrature of K against a finite-difference div(omega Y).
 */
inline IdentityEval directional_gradient_identity(const VorticityModel& model, const YField& y_field,
                                                  const Vec2& x, const IdentityOptions& opts = {}) {
    Vec2 center{};
    double support = opts.shear_window, scale = 1.0;
    if (const auto* s = std::get_if<SmoothModel>(&model.kind())) {
        center = s->center;
        support = s->support_radius;
        scale = s->length_scale;
    } else if (const auto* r = std::get_if<RadialModel>(&model.kind())) {
        center = r->center;
        support = r->profile.support();
        scale = support / 8.0;
    } else if (model.is_shear()) {
        center = {x.x, 0.5 * (std::get<ShearModel>(model.kind()).profile.c() +
                              std::get<ShearModel>(model.kind()).profile.d())};
        scale = model.diameter() / 8.0;
    } else {
        throw ModelError("directional_gradient_identity: needs a model with classical omega (not patch)");
    }
    auto omega = [&](const Vec2& p) { return vorticity(model, p); };

    IdentityEval out;
    out.lhs = grad_velocity(model, x, opts.field).value * y_field(x);

    PvOptions pv = opts.field.pv;
    pv.outer_radius = (center - x).norm() + support;
    pv.h0 = std::min(pv.h0, 1e-3 * scale);
    pv.max_panel = std::min(pv.max_panel, 0.25 * scale);
    const Vec2 yx = y_field(x);
    const auto pv_term = pv_transform(
        [&](const Vec2& a, const Vec2& b) { return grad_biot_savart(a - b) * (yx - y_field(b)); }, omega, x, pv);

    const double h = opts.fd_relative * scale;
    auto flux = [&](const Vec2& p) { return y_field(p) * omega(p); };
    auto divergence = [&](const Vec2& p) {
        const Vec2 ex{h, 0.0}, ey{0.0, h};
        const double dx = (-flux(p + ex * 2.0).x + 8.0 * flux(p + ex).x - 8.0 * flux(p - ex).x + flux(p - ex * 2.0).x);
        const double dy = (-flux(p + ey * 2.0).y + 8.0 * flux(p + ey).y - 8.0 * flux(p - ey).y + flux(p - ey * 2.0).y);
        return (dx + dy) / (12.0 * h);
    };
    const Vec2 conv = biot_savart_convolution(divergence, x, center, support + 2.0 * h, scale,
                                              opts.field.angular_tol);
    out.rhs = pv_term.value + conv;
    out.residual = (out.lhs - out.rhs).norm();
    return out;
}

struct ReferenceSolution {
    Vec2 u{};
    Mat2 grad_u{};
    Mat2 A{};
    Mat2 gamma{};
};

/**
 * Closed forms for the stationary radial and shear solutions.
 * Radial: Y = e_theta, A = chi (1/r^2) [[-x1 x2, -x2^2], [x1^2, x1 x2]],
 *         Gamma = grad u - omega A, which for chi = 1 is
 *         (1/r^4) int_0^r rho g [[2 x1 x2, x2^2 - x1^2], [x2^2 - x1^2, -2 x1 x2]].
 * Shear:  Y = (1, 0), A = [[0, -1], [0, 0]], Gamma = 0.
 */
inline ReferenceSolution reference_solution(const VorticityModel& model, const Vec2& x, double chi = 1.0) {
    ReferenceSolution ref;
    if (const auto* r = std::get_if<RadialModel>(&model.kind())) {
        ref.u = velocity(model, x);
        ref.grad_u = grad_velocity(model, x).value;
        const Vec2 z = x - r->center;
        const double r2 = z.norm2();
        if (r2 > 0.0) ref.A = detail::tangential_structure(z) * chi;
        ref.gamma = ref.grad_u - ref.A * vorticity(model, x);
        return ref;
    }
    if (const auto* s = std::get_if<ShearModel>(&model.kind())) {
        const double w = s->profile(x.y);
        ref.u = {-s->profile.primitive(x.y), 0.0};
        ref.grad_u = {0.0, -w, 0.0, 0.0};
        ref.A = Mat2{0.0, -1.0, 0.0, 0.0} * chi;
        ref.gamma = ref.grad_u - ref.A * w;
        return ref;
    }
    throw ModelError("reference_solution: closed forms exist only for radial and shear models");
}

/// Closed-form Gamma for radial models with chi = 1 (used as an oracle).
inline Mat2 radial_gamma_closed_form(const RadialModel& m, const Vec2& x) {
    const Vec2 z = x - m.center;
    const double r2 = z.norm2();
    if (r2 == 0.0) return {};
    return detail::radial_sym_structure(z) * (m.profile.moment(std::sqrt(r2)) / (r2 * r2));
}

/// Regular polygon approximations of circles and ellipses (counter-clockwise).
inline std::vector<Vec2> ellipse_nodes(Vec2 center, double a, double b, std::size_t n, double phase = 0.0) {
    std::vector<Vec2> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = phase + kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        nodes[i] = center + Vec2{a * std::cos(t), b * std::sin(t)};
    }
    return nodes;
}
inline std::vector<Vec2> circle_nodes(Vec2 center, double radius, std::size_t n, double phase = 0.0) {
    return ellipse_nodes(center, radius, radius, n, phase);
}

}  // namespace vortexlab

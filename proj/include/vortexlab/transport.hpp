#pragma once
// Lagrangian flow-map integration: markers carry positions, Jacobians and
// labels. Positions follow d eta/dt = u(t, eta) and Jacobians the variational
// equation d(grad eta)/dt = grad u(t, eta) grad eta, both with classical RK4.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vortexlab/fields.hpp"
#include "vortexlab/geometry.hpp"
#include "vortexlab/holder.hpp"
#include "vortexlab/parallel.hpp"

namespace vortexlab {

class MarkerEvaluationError : public std::runtime_error {
public:
    MarkerEvaluationError(std::size_t index, const std::string& cause)
        : std::runtime_error("marker " + std::to_string(index) + ": " + cause), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class TransportInputError : public std::invalid_argument {
public:
    explicit TransportInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Time-dependent velocity field with its gradient.
struct VelocityField {
    std::function<Vec2(double, const Vec2&)> u;
    std::function<Mat2(double, const Vec2&)> grad;

    static VelocityField zero() {
        return {[](double, const Vec2&) { return Vec2{}; }, [](double, const Vec2&) { return Mat2{}; }};
    }
    /// u = rate (-x2, x1): rigid rotation with angular velocity `rate`.
    static VelocityField rigid_rotation(double rate = 0.5) {
        return {[rate](double, const Vec2& x) { return x.perp() * rate; },
                [rate](double, const Vec2&) { return kJ * rate; }};
    }
    /// Stationary field induced by a fixed vorticity model.
    static VelocityField frozen(VorticityModel model, FieldOptions opts = {}) {
        auto shared = std::make_shared<VorticityModel>(std::move(model));
        return {[shared, opts](double, const Vec2& x) { return velocity(*shared, x, opts); },
                [shared, opts](double, const Vec2& x) { return grad_velocity(*shared, x, opts).value; }};
    }
};

struct Marker {
    Vec2 x0{};
    Vec2 position{};
    Mat2 jacobian = Mat2::identity();
};

/// Markers plus named Lagrangian labels (omega0, phi0, weight, Y0, ...).
struct FlowState {
    std::vector<Marker> markers;
    std::map<std::string, std::vector<double>> scalars;
    std::map<std::string, std::vector<Vec2>> vectors;
    double time{0.0};
    double dt{1e-3};

    static FlowState at_rest(const std::vector<Vec2>& x0, double dt) {
        if (!(dt > 0.0)) throw TransportInputError("FlowState: dt must be positive");
        FlowState s;
        s.dt = dt;
        s.markers.reserve(x0.size());
        for (const auto& p : x0) s.markers.push_back({p, p, Mat2::identity()});
        return s;
    }

    std::size_t size() const { return markers.size(); }

    void add_scalar(const std::string& name, const std::function<double(const Vec2&)>& f) {
        auto& v = scalars[name];
        v.resize(markers.size());
        for (std::size_t i = 0; i < markers.size(); ++i) v[i] = f(markers[i].x0);
    }
    void add_vector(const std::string& name, const std::function<Vec2(const Vec2&)>& f) {
        auto& v = vectors[name];
        v.resize(markers.size());
        for (std::size_t i = 0; i < markers.size(); ++i) v[i] = f(markers[i].x0);
    }

    std::vector<Vec2> positions() const {
        std::vector<Vec2> out(markers.size());
        for (std::size_t i = 0; i < markers.size(); ++i) out[i] = markers[i].position;
        return out;
    }

    const std::vector<double>& scalar(const std::string& name) const {
        auto it = scalars.find(name);
        if (it == scalars.end()) throw TransportInputError("FlowState: no carried scalar '" + name + "'");
        return it->second;
    }
    const std::vector<Vec2>& vector(const std::string& name) const {
        auto it = vectors.find(name);
        if (it == vectors.end()) throw TransportInputError("FlowState: no carried vector '" + name + "'");
        return it->second;
    }
};

namespace detail {

struct PhasePoint {
    Vec2 x;
    Mat2 j;
};

// f(stage, t_stage, x) -> (u, grad u); stage in 0..3.
template <class F>
PhasePoint rk4_staged(const PhasePoint& p, double t, double dt, F&& f) {
    const auto [k1, g1] = f(0, t, p.x);
    const Mat2 m1 = g1 * p.j;
    const Vec2 x2 = p.x + k1 * (0.5 * dt);
    const Mat2 j2 = p.j + m1 * (0.5 * dt);
    const auto [k2, g2] = f(1, t + 0.5 * dt, x2);
    const Mat2 m2 = g2 * j2;
    const Vec2 x3 = p.x + k2 * (0.5 * dt);
    const Mat2 j3 = p.j + m2 * (0.5 * dt);
    const auto [k3, g3] = f(2, t + 0.5 * dt, x3);
    const Mat2 m3 = g3 * j3;
    const Vec2 x4 = p.x + k3 * dt;
    const Mat2 j4 = p.j + m3 * dt;
    const auto [k4, g4] = f(3, t + dt, x4);
    const Mat2 m4 = g4 * j4;
    return {p.x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0),
            p.j + (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (dt / 6.0)};
}

template <class U, class G>
PhasePoint rk4_phase(const PhasePoint& p, double t, double dt, U&& u, G&& grad) {
    return rk4_staged(p, t, dt, [&](int, double s, const Vec2& x) { return std::pair<Vec2, Mat2>{u(s, x), grad(s, x)}; });
}

}  // namespace detail

/// One RK4 step of all markers in a given (frozen or prescribed) field.
inline FlowState step_flow(const FlowState& state, const VelocityField& field) {
    if (!(state.dt > 0.0)) throw TransportInputError("step_flow: dt must be positive");
    FlowState next = state;
    parallel_for(state.markers.size(), [&](std::size_t i) {
        try {
            const auto& m = state.markers[i];
            const auto p = detail::rk4_phase({m.position, m.jacobian}, state.time, state.dt, field.u, field.grad);
            next.markers[i].position = p.x;
            next.markers[i].jacobian = p.j;
        } catch (const std::exception& e) {
            throw MarkerEvaluationError(i, e.what());
        }
    });
    next.time = state.time + state.dt;
    return next;
}

/// Advance to `horizon` (t = 0 .. horizon, step count rounded to the nearest integer).
inline FlowState integrate_flow(FlowState state, const VelocityField& field, double horizon) {
    const auto steps = static_cast<long>(std::llround(horizon / state.dt));
    for (long k = 0; k < steps; ++k) state = step_flow(state, field);
    return state;
}

/**
 * Self-consistent vortex-patch evolution by contour dynamics: the boundary
 * polygon is advected by its own velocity and the markers share the same RK4
 * stages. Node positions and velocities at every step are kept so the field
 * can be replayed at intermediate times (cubic Hermite in time).
 */
class ContourDynamics {
public:
    ContourDynamics(std::vector<Vec2> nodes, double amplitude, double dt)
        : nodes_(std::move(nodes)), amplitude_(amplitude), dt_(dt) {
        if (nodes_.size() < 3) throw TransportInputError("ContourDynamics: need at least three nodes");
        if (!(dt > 0.0)) throw TransportInputError("ContourDynamics: dt must be positive");
        if (ClosedCurve(nodes_).signed_area() < 0.0) std::reverse(nodes_.begin(), nodes_.end());
        history_nodes_.push_back(nodes_);
        history_velocity_.push_back(node_velocities(nodes_));
    }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    double amplitude() const { return amplitude_; }
    double time() const { return dt_ * static_cast<double>(history_nodes_.size() - 1); }
    double dt() const { return dt_; }
    std::size_t steps() const { return history_nodes_.size() - 1; }

    double area() const { return ClosedCurve(nodes_, false).signed_area(); }
    VorticityModel model() const { return VorticityModel::patch(nodes_, amplitude_); }

    /// Advances the boundary and the markers (whose time must match) by one step.
    FlowState step(const FlowState& markers) {
        if (std::abs(markers.time - time()) > 1e-9 * (1.0 + time())) {
            throw TransportInputError("ContourDynamics::step: marker time does not match the contour time");
        }
        const std::size_t n = nodes_.size();
        const double dt = dt_;
        auto stage_velocity = [&](const std::vector<Vec2>& poly) { return node_velocities(poly); };

        const auto k1 = stage_velocity(nodes_);
        std::vector<Vec2> s2(n), s3(n), s4(n);
        for (std::size_t i = 0; i < n; ++i) s2[i] = nodes_[i] + k1[i] * (0.5 * dt);
        const auto k2 = stage_velocity(s2);
        for (std::size_t i = 0; i < n; ++i) s3[i] = nodes_[i] + k2[i] * (0.5 * dt);
        const auto k3 = stage_velocity(s3);
        for (std::size_t i = 0; i < n; ++i) s4[i] = nodes_[i] + k3[i] * dt;
        const auto k4 = stage_velocity(s4);

        FlowState next = markers;
        const std::vector<Vec2>* stages[4] = {&nodes_, &s2, &s3, &s4};
        parallel_for(markers.markers.size(), [&](std::size_t i) {
            try {
                const auto& m = markers.markers[i];
                // Stage k sees the field of the k-th stage polygon.
                const auto p = detail::rk4_staged({m.position, m.jacobian}, markers.time, dt,
                                                  [&](int stage, double, const Vec2& x) {
                                                      const auto& poly = *stages[stage];
                                                      return std::pair<Vec2, Mat2>{
                                                          polygon_velocity(poly, amplitude_, x),
                                                          polygon_velocity_gradient(poly, amplitude_, x)};
                                                  });
                next.markers[i].position = p.x;
                next.markers[i].jacobian = p.j;
            } catch (const std::exception& e) {
                throw MarkerEvaluationError(i, e.what());
            }
        });
        next.time = markers.time + dt;

        for (std::size_t i = 0; i < n; ++i) {
            nodes_[i] = nodes_[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        history_nodes_.push_back(nodes_);
        history_velocity_.push_back(node_velocities(nodes_));
        return next;
    }

    /// Advance the contour alone.
    void step() { step(FlowState{{}, {}, {}, time(), dt_}); }

    /// Boundary polygon at time t in [0, time()], cubic Hermite between stored steps.
    std::vector<Vec2> nodes_at(double t) const {
        if (t < -1e-12 || t > time() + 1e-12) {
            throw TransportInputError("ContourDynamics::nodes_at: time outside the simulated horizon");
        }
        const double s = std::clamp(t / dt_, 0.0, static_cast<double>(steps()));
        const std::size_t k = std::min(static_cast<std::size_t>(s), steps() == 0 ? 0 : steps() - 1);
        if (steps() == 0) return history_nodes_[0];
        const double tau = s - static_cast<double>(k);
        const double h00 = (1 + 2 * tau) * (1 - tau) * (1 - tau), h10 = tau * (1 - tau) * (1 - tau);
        const double h01 = tau * tau * (3 - 2 * tau), h11 = tau * tau * (tau - 1);
        const auto& p0 = history_nodes_[k];
        const auto& p1 = history_nodes_[k + 1];
        const auto& v0 = history_velocity_[k];
        const auto& v1 = history_velocity_[k + 1];
        std::vector<Vec2> out(p0.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = p0[i] * h00 + v0[i] * (h10 * dt_) + p1[i] * h01 + v1[i] * (h11 * dt_);
        }
        return out;
    }

    /// Field of the current boundary, held fixed in time.
    VelocityField current_field() const {
        auto poly = std::make_shared<std::vector<Vec2>>(nodes_);
        const double amp = amplitude_;
        return {[poly, amp](double, const Vec2& x) { return polygon_velocity(*poly, amp, x); },
                [poly, amp](double, const Vec2& x) { return polygon_velocity_gradient(*poly, amp, x); }};
    }

    /// Replay of the recorded evolution, valid on [0, time()].
    VelocityField history_field() const {
        auto self = std::make_shared<ContourDynamics>(*this);
        return {[self](double t, const Vec2& x) { return polygon_velocity(self->nodes_at(t), self->amplitude_, x); },
                [self](double t, const Vec2& x) {
                    return polygon_velocity_gradient(self->nodes_at(t), self->amplitude_, x);
                }};
    }

private:
    std::vector<Vec2> node_velocities(const std::vector<Vec2>& poly) const {
        std::vector<Vec2> v(poly.size());
        parallel_for(poly.size(), [&](std::size_t i) { v[i] = polygon_velocity(poly, amplitude_, poly[i]); });
        return v;
    }

    std::vector<Vec2> nodes_;
    double amplitude_;
    double dt_;
    std::vector<std::vector<Vec2>> history_nodes_;
    std::vector<std::vector<Vec2>> history_velocity_;
};

struct InverseMapResult {
    Vec2 x0{};
    /// Jacobian of eta^{-1}(t, .) at the query point.
    Mat2 jacobian = Mat2::identity();
};

/// eta^{-1}(t, x) and its Jacobian by backward RK4 from time t to 0 (about `dt` steps).
inline InverseMapResult inverse_map_with_jacobian(const VelocityField& field, const Vec2& x, double t, double dt) {
    if (!(dt > 0.0)) throw TransportInputError("inverse_map: dt must be positive");
    if (t < 0.0) throw TransportInputError("inverse_map: t must be nonnegative");
    const auto steps = std::max<long>(static_cast<long>(std::ceil(t / dt - 1e-9)), t > 0.0 ? 1 : 0);
    if (steps == 0) return {x, Mat2::identity()};
    const double h = t / static_cast<double>(steps);
    auto back_u = [&](double s, const Vec2& p) { return field.u(s, p) * -1.0; };
    auto back_g = [&](double s, const Vec2& p) { return field.grad(s, p) * -1.0; };
    // Integrate in reversed time tau = t - s; field time is t - tau.
    detail::PhasePoint p{x, Mat2::identity()};
    for (long k = 0; k < steps; ++k) {
        const double tau = h * static_cast<double>(k);
        auto u = [&](double tt, const Vec2& q) { return back_u(t - tt, q); };
        auto g = [&](double tt, const Vec2& q) { return back_g(t - tt, q); };
        p = detail::rk4_phase(p, tau, h, u, g);
    }
    return {p.x, p.j};
}

inline Vec2 inverse_map(const VelocityField& field, const Vec2& x, double t, double dt) {
    return inverse_map_with_jacobian(field, x, t, dt).x0;
}

/// Y(t) sampled at the markers: jacobian * Y0(x0).
inline SampledField<Vec2> pushforward_Y(const FlowState& state, const std::string& name = "Y0") {
    const auto& y0 = state.vector(name);
    SampledField<Vec2> out;
    for (std::size_t i = 0; i < state.markers.size(); ++i) {
        out.push_back(state.markers[i].position, state.markers[i].jacobian * y0[i]);
    }
    return out;
}

/// Y(t, x) = (grad eta^{-1}(x))^{-1} Y0(eta^{-1}(x)) at an arbitrary point.
inline Vec2 pushforward_Y_at(const VelocityField& field, const std::function<Vec2(const Vec2&)>& y0,
                             const Vec2& x, double t, double dt) {
    const auto inv = inverse_map_with_jacobian(field, x, t, dt);
    const Mat2& j = inv.jacobian;
    const double det = j.det();
    const Mat2 forward = Mat2{j.a22, -j.a12, -j.a21, j.a11} / det;
    return forward * y0(inv.x0);
}

/// f0(eta^{-1}(t, x)): a Lagrangian scalar (omega0, phi0, chi0) seen at time t.
inline double transport_scalar(const VelocityField& field, const std::function<double(const Vec2&)>& f0,
                               const Vec2& x, double t, double dt) {
    return f0(inverse_map(field, x, t, dt));
}

/// sum_i |s_i|^p w_i det(J_i): the L^p norm (to the p) of a carried scalar in
/// Lagrangian quadrature, `weight` holding initial cell areas.
inline double lagrangian_lp(const FlowState& state, const std::string& scalar, double p,
                            const std::string& weight = "weight") {
    const auto& s = state.scalar(scalar);
    const auto& w = state.scalar(weight);
    double total = 0.0;
    for (std::size_t i = 0; i < state.markers.size(); ++i) {
        total += std::pow(std::abs(s[i]), p) * w[i] * state.markers[i].jacobian.det();
    }
    return total;
}

inline double max_det_deviation(const FlowState& state) {
    double worst = 0.0;
    for (const auto& m : state.markers) worst = std::max(worst, std::abs(m.jacobian.det() - 1.0));
    return worst;
}

/// Trapezoid integral of aligned samples.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& g) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (g[k] + g[k - 1]);
    return out;
}

struct GronwallSample {
    std::vector<double> times;
    std::vector<double> f, g, h;
};

enum class GronwallDirection { forward, reverse };

struct GronwallCertificate {
    bool holds{true};
    /// min over times of (bound - f) forward or (f - bound) reverse; negative iff violated.
    double worst_margin{0.0};
    std::size_t worst_index{0};
};

inline GronwallCertificate check_gronwall(const GronwallSample& s, GronwallDirection direction,
                                          double rel_tol = 1e-12) {
    const std::size_t n = s.times.size();
    if (n == 0 || s.f.size() != n || s.g.size() != n || s.h.size() != n) {
        throw TransportInputError("check_gronwall: times, f, g, h must be nonempty and aligned");
    }
    bool up = true, down = true;
    for (std::size_t k = 1; k < n; ++k) {
        if (!(s.times[k] > s.times[k - 1])) throw TransportInputError("check_gronwall: times must increase");
        up = up && s.h[k] >= s.h[k - 1];
        down = down && s.h[k] <= s.h[k - 1];
    }
    if (!up && !down) throw TransportInputError("check_gronwall: h must be monotone");
    for (double gv : s.g) {
        if (gv < 0.0) throw TransportInputError("check_gronwall: g must be nonnegative");
    }
    const auto integral = cumulative_trapezoid(s.times, s.g);
    GronwallCertificate cert;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double bound = direction == GronwallDirection::forward ? s.h[k] * std::exp(integral[k])
                                                                     : s.h[k] * std::exp(-integral[k]);
        const double margin = direction == GronwallDirection::forward ? bound - s.f[k] : s.f[k] - bound;
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_index = k;
        }
        if (margin < -rel_tol * std::max(1.0, std::abs(bound))) cert.holds = false;
    }
    return cert;
}

struct SeparationReport {
    std::size_t checked{0};
    std::size_t violations{0};
    double integral_V{0.0};
    /// min over pairs of |eta x - eta y| / (|x - y| e^{-int V}) (>= 1 when the lower bound holds).
    double lower_ratio{std::numeric_limits<double>::infinity()};
    /// max over pairs of |eta x - eta y| / (|x - y| e^{int V}) (<= 1 when the upper bound holds).
    double upper_ratio{0.0};
    std::vector<std::pair<std::size_t, std::size_t>> violating_pairs;
};

/**
 * |x - y| e^{-int V} <= |eta(t,x) - eta(t,y)| <= |x - y| e^{int V} for the given
 * marker pairs, int V by the trapezoid rule over (times, V) up to state.time.
 */
inline SeparationReport separation_bounds(const FlowState& state,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                          const std::vector<double>& times, const std::vector<double>& V,
                                          double rel_tol = 1e-10) {
    if (times.size() != V.size() || times.empty()) {
        throw TransportInputError("separation_bounds: V history must align with its time grid");
    }
    const double iv = cumulative_trapezoid(times, V).back();
    SeparationReport rep;
    rep.integral_V = iv;
    const double grow = std::exp(iv), shrink = std::exp(-iv);
    for (const auto& [i, j] : pairs) {
        const auto& a = state.markers.at(i);
        const auto& b = state.markers.at(j);
        const double d0 = (a.x0 - b.x0).norm();
        const double d = (a.position - b.position).norm();
        if (d0 == 0.0) continue;
        ++rep.checked;
        const double lo = d / (d0 * shrink), hi = d / (d0 * grow);
        rep.lower_ratio = std::min(rep.lower_ratio, lo);
        rep.upper_ratio = std::max(rep.upper_ratio, hi);
        if (lo < 1.0 - rel_tol || hi > 1.0 + rel_tol) {
            ++rep.violations;
            rep.violating_pairs.emplace_back(i, j);
        }
    }
    return rep;
}

/// Sampled ||grad u(t)||_{L^inf} in the spectral norm (the Lipschitz constant of u).
inline double gradient_sup(const VelocityField& field, double t, const std::vector<Vec2>& samples) {
    std::vector<double> vals(samples.size(), 0.0);
    parallel_for(samples.size(), [&](std::size_t i) { vals[i] = field.grad(t, samples[i]).spectral_norm(); });
    double best = 0.0;
    for (double v : vals) best = std::max(best, v);
    return best;
}

}  // namespace vortexlab

#pragma once
// Scenario description: the vorticity model, Y0, marker layout and time grid,
// read from a flat config, plus the run driver producing checkpoints.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vortexlab/config.hpp"
#include "vortexlab/diagnostics.hpp"
#include "vortexlab/fields.hpp"
#include "vortexlab/transport.hpp"

namespace vortexlab {

enum class RunMode { frozen, self_consistent };

struct ModelSpec {
    std::string kind{"radial"};     // radial | patch | shear | smooth
    std::string shape{"circle"};    // patch: circle | ellipse
    double radius{1.0};             // radial outer radius, circle radius
    double inner_radius{0.0};       // radial annulus inner radius
    Vec2 semi_axes{1.0, 0.6};       // ellipse
    double amplitude{1.0};
    Vec2 center{};
    long nodes{256};                // patch polygon nodes
    double sigma{0.5};              // smooth Gaussian width
    Vec2 strip{-1.0, 1.0};          // shear [c, d]
    long modes{1};                  // shear sine modes
};

struct Scenario {
    std::string name{"scenario"};
    ModelSpec model;
    std::string y0_kind{"auto"};    // auto | level_set_tangent | unit_tangent | rotational | constant
    Vec2 y0_value{1.0, 0.0};
    double alpha{0.5};
    double horizon{1.0};
    double dt{1e-2};
    RunMode mode{RunMode::frozen};
    long checkpoints{10};
    long rings{12};
    long per_ring{48};
    double extent{1.5};             // marker layout reaches extent * (shape scale)
    long boundary_nodes{256};       // level-curve markers in frozen runs
    double delta0{0.4};
    Window window{{-2.0, -2.0}, {2.0, 2.0}};
    std::vector<double> refinement_spacings{};
    std::optional<Window> refinement_band{};
    std::uint64_t seed{1};
};

namespace detail {
inline Window read_window(const Config& c, const std::string& key, const Window& fallback) {
    const auto v = c.get_list(key, {fallback.lo.x, fallback.lo.y, fallback.hi.x, fallback.hi.y});
    if (v.size() != 4 || !(v[2] > v[0]) || !(v[3] > v[1])) {
        c.fail(key, "expected 'xmin, ymin, xmax, ymax' with xmin < xmax and ymin < ymax");
    }
    return {{v[0], v[1]}, {v[2], v[3]}};
}
}  // namespace detail

/// Reads and validates a scenario; unknown keys and out-of-range values throw ConfigError.
inline Scenario parse_scenario(const Config& c) {
    Scenario s;
    s.name = c.get_string("name", s.name);
    auto& m = s.model;
    m.kind = c.get_string("model.kind", m.kind);
    if (m.kind != "radial" && m.kind != "patch" && m.kind != "shear" && m.kind != "smooth") {
        c.fail("model.kind", "expected radial, patch, shear or smooth");
    }
    m.shape = c.get_string("model.shape", m.shape);
    if (m.shape != "circle" && m.shape != "ellipse") c.fail("model.shape", "expected circle or ellipse");
    m.radius = c.get_double("model.radius", m.radius);
    m.inner_radius = c.get_double("model.inner_radius", m.inner_radius);
    m.semi_axes = c.get_vec2("model.semi_axes", m.semi_axes);
    m.amplitude = c.get_double("model.amplitude", m.amplitude);
    m.center = c.get_vec2("model.center", m.center);
    m.nodes = c.get_int("model.nodes", m.nodes);
    m.sigma = c.get_double("model.sigma", m.sigma);
    m.strip = c.get_vec2("model.strip", m.strip);
    m.modes = c.get_int("model.modes", m.modes);
    if (!(m.radius > 0.0)) c.fail("model.radius", "must be positive");
    if (!(m.inner_radius >= 0.0 && m.inner_radius < m.radius)) c.fail("model.inner_radius", "must lie in [0, radius)");
    if (!(m.semi_axes.x > 0.0 && m.semi_axes.y > 0.0)) c.fail("model.semi_axes", "must be positive");
    if (m.nodes < 8) c.fail("model.nodes", "need at least 8 boundary nodes");
    if (!(m.sigma > 0.0)) c.fail("model.sigma", "must be positive");
    if (!(m.strip.y > m.strip.x)) c.fail("model.strip", "need c < d");
    if (m.modes < 1) c.fail("model.modes", "must be positive");

    s.y0_kind = c.get_string("y0.kind", s.y0_kind);
    if (s.y0_kind != "auto" && s.y0_kind != "level_set_tangent" && s.y0_kind != "unit_tangent" &&
        s.y0_kind != "rotational" && s.y0_kind != "constant") {
        c.fail("y0.kind", "expected auto, level_set_tangent, unit_tangent, rotational or constant");
    }
    s.y0_value = c.get_vec2("y0.value", s.y0_value);
    if (s.y0_kind == "level_set_tangent" && m.kind != "radial" && m.kind != "patch") {
        c.fail("y0.kind", "level_set_tangent needs a radial or patch model");
    }

    s.alpha = c.get_double("alpha", s.alpha);
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) c.fail("alpha", "must lie in (0, 1)");
    s.horizon = c.get_double("horizon", s.horizon);
    if (!(s.horizon >= 0.0)) c.fail("horizon", "must be nonnegative");
    s.dt = c.get_double("dt", s.dt);
    if (!(s.dt > 0.0)) c.fail("dt", "must be positive");
    const std::string mode = c.get_string("mode", "frozen");
    if (mode == "frozen") {
        s.mode = RunMode::frozen;
    } else if (mode == "self_consistent") {
        s.mode = RunMode::self_consistent;
        if (m.kind != "patch") c.fail("mode", "self_consistent runs need model.kind = patch");
    } else {
        c.fail("mode", "expected frozen or self_consistent");
    }
    s.checkpoints = c.get_int("checkpoints", s.checkpoints);
    if (s.checkpoints < 1) c.fail("checkpoints", "must be at least 1");
    s.rings = c.get_int("markers.rings", s.rings);
    s.per_ring = c.get_int("markers.per_ring", s.per_ring);
    s.extent = c.get_double("markers.extent", s.extent);
    s.boundary_nodes = c.get_int("markers.boundary_nodes", s.boundary_nodes);
    if (s.rings < 1) c.fail("markers.rings", "must be at least 1");
    if (s.per_ring < 8) c.fail("markers.per_ring", "must be at least 8");
    if (!(s.extent > 0.0)) c.fail("markers.extent", "must be positive");
    if (s.boundary_nodes < 8) c.fail("markers.boundary_nodes", "must be at least 8");
    s.delta0 = c.get_double("delta0", s.delta0);
    if (!(s.delta0 > 0.0)) c.fail("delta0", "must be positive");
    s.window = detail::read_window(c, "window", s.window);
    s.refinement_spacings = c.get_list("refinement.spacings", {});
    if (!s.refinement_spacings.empty()) {
        if (s.refinement_spacings.size() < 3) c.fail("refinement.spacings", "need at least three spacings");
        for (std::size_t i = 0; i < s.refinement_spacings.size(); ++i) {
            if (!(s.refinement_spacings[i] > 0.0) || (i > 0 && !(s.refinement_spacings[i] < s.refinement_spacings[i - 1]))) {
                c.fail("refinement.spacings", "must be positive and decreasing");
            }
        }
    }
    if (c.has("refinement.band")) s.refinement_band = detail::read_window(c, "refinement.band", {});
    const long seed = c.get_int("seed", static_cast<long>(s.seed));
    if (seed < 0) c.fail("seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
    c.reject_unknown();
    return s;
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(Config::load(path)); }

inline VorticityModel build_model(const Scenario& s) {
    const auto& m = s.model;
    if (m.kind == "radial") {
        return VorticityModel::radial(RadialProfile::indicator(m.inner_radius, m.radius, m.amplitude), m.center);
    }
    if (m.kind == "patch") {
        const Vec2 ax = m.shape == "ellipse" ? m.semi_axes : Vec2{m.radius, m.radius};
        return VorticityModel::patch(ellipse_nodes(m.center, ax.x, ax.y, static_cast<std::size_t>(m.nodes)),
                                     m.amplitude);
    }
    if (m.kind == "shear") {
        return VorticityModel::shear(ShearProfile::sine(m.strip.x, m.strip.y, m.amplitude, static_cast<int>(m.modes)));
    }
    return VorticityModel::gaussian(m.sigma, m.amplitude, m.center);
}

/// Semi-axes of the reference curve (boundary for radial / patch, 3 sigma circle for smooth).
inline Vec2 reference_axes(const Scenario& s) {
    const auto& m = s.model;
    if (m.kind == "patch" && m.shape == "ellipse") return m.semi_axes;
    if (m.kind == "smooth") return {3.0 * m.sigma, 3.0 * m.sigma};
    return {m.radius, m.radius};
}

/// phi0 whose zero set is the patch boundary (radial / patch only).
inline std::optional<LevelSet> initial_level_set(const Scenario& s) {
    const auto& m = s.model;
    if (m.kind == "radial") return LevelSet::circle(m.center, m.radius);
    if (m.kind == "patch") {
        if (m.shape == "ellipse") return LevelSet::ellipse(m.center, m.semi_axes.x, m.semi_axes.y);
        return LevelSet::circle(m.center, m.radius);
    }
    return std::nullopt;
}

inline YField initial_Y(const Scenario& s) {
    std::string kind = s.y0_kind;
    if (kind == "auto") {
        kind = (s.model.kind == "radial" || s.model.kind == "patch") ? "level_set_tangent"
               : s.model.kind == "shear"                               ? "constant"
                                                                       : "rotational";
    }
    if (kind == "level_set_tangent") {
        return initial_level_set(s)->tangent_field();
    }
    if (kind == "unit_tangent") return YField::unit_tangent(s.model.center);
    if (kind == "rotational") return YField::rotational(s.model.center);
    return YField::constant(s.y0_value);
}

/// chi0: level-set cutoff of width delta0 for patches, 1 for shear, 0 for smooth models.
inline std::function<double(const Vec2&)> initial_chi(const Scenario& s) {
    if (const auto phi = initial_level_set(s)) return level_set_cutoff(*phi, s.delta0);
    if (s.model.kind == "shear") return [](const Vec2&) { return 1.0; };
    return [](const Vec2&) { return 0.0; };
}

struct MarkerLayout {
    std::vector<Vec2> points;
    std::vector<double> weights;
    double spacing{0.0};
};

/// Mapped polar cells c + (a s cos t, b s sin t), s in (0, extent], cell-centred,
/// weight a b s ds dt; shear scenarios use a uniform grid of the window instead.
inline MarkerLayout marker_layout(const Scenario& s) {
    MarkerLayout out;
    if (s.model.kind == "shear") {
        const double hx = (s.window.hi.x - s.window.lo.x) / static_cast<double>(s.per_ring);
        const double hy = (s.window.hi.y - s.window.lo.y) / static_cast<double>(s.rings);
        for (long j = 0; j < s.rings; ++j)
            for (long i = 0; i < s.per_ring; ++i) {
                out.points.push_back({s.window.lo.x + hx * (i + 0.5), s.window.lo.y + hy * (j + 0.5)});
                out.weights.push_back(hx * hy);
            }
        out.spacing = std::max(hx, hy);
        return out;
    }
    const Vec2 ax = reference_axes(s);
    const double ds = s.extent / static_cast<double>(s.rings);
    const double dth = kTwoPi / static_cast<double>(s.per_ring);
    for (long k = 0; k < s.rings; ++k) {
        const double sv = ds * (k + 0.5);
        for (long j = 0; j < s.per_ring; ++j) {
            const double th = dth * (j + 0.5);
            out.points.push_back(s.model.center + Vec2{ax.x * sv * std::cos(th), ax.y * sv * std::sin(th)});
            out.weights.push_back(ax.x * ax.y * sv * ds * dth);
        }
    }
    out.spacing = std::max(ds * std::max(ax.x, ax.y), s.extent * std::max(ax.x, ax.y) * dth);
    return out;
}

/// Initial markers carrying omega0, chi0, weight and Y0.
inline FlowState initial_state(const Scenario& s, const VorticityModel& model) {
    const auto layout = marker_layout(s);
    FlowState st = FlowState::at_rest(layout.points, s.dt);
    st.scalars["weight"] = layout.weights;
    st.add_scalar("omega0", [&](const Vec2& x) { return vorticity(model, x); });
    st.add_scalar("chi0", initial_chi(s));
    st.add_vector("Y0", initial_Y(s).eval);
    if (const auto phi = initial_level_set(s)) st.add_scalar("phi0", phi->value);
    return st;
}

inline std::vector<Vec2> initial_boundary(const Scenario& s, std::size_t n) {
    const Vec2 ax = reference_axes(s);
    return ellipse_nodes(s.model.center, ax.x, ax.y, n);
}

struct RunResult {
    std::vector<RunSnapshot> checkpoints;
    VorticityModel initial_model = VorticityModel::zero();
    /// Replayable field over [0, horizon] (frozen field or contour history).
    VelocityField field;
};

/// Step indices of checkpoints t_k = k T / K, k = 0..K (just t = 0 when T = 0).
inline std::vector<long> checkpoint_steps(const Scenario& s) {
    const long steps = std::lround(s.horizon / s.dt);
    if (steps == 0) return {0};
    std::vector<long> out;
    for (long k = 0; k <= s.checkpoints; ++k) {
        const long n = std::lround(static_cast<double>(k) * static_cast<double>(steps) / static_cast<double>(s.checkpoints));
        if (out.empty() || n > out.back()) out.push_back(n);
    }
    return out;
}

/// Model driving frozen runs: the Gaussian vortex is radial, so its field is
/// taken from the radial closed form instead of the ray quadrature.
inline VorticityModel transport_model(const Scenario& s, const VorticityModel& model) {
    if (s.model.kind != "smooth") return model;
    const double sig = s.model.sigma;
    return VorticityModel::radial(RadialProfile::gaussian(sig, s.model.amplitude, 6.5 * sig), s.model.center);
}

inline RunResult run_scenario(const Scenario& s) {
    RunResult res;
    res.initial_model = build_model(s);
    FlowState markers = initial_state(s, res.initial_model);
    const double spacing = marker_layout(s).spacing;
    const auto stops = checkpoint_steps(s);
    const bool has_curve = initial_level_set(s).has_value();

    if (s.mode == RunMode::self_consistent) {
        const auto& pm = std::get<PatchModel>(res.initial_model.kind());
        ContourDynamics cd(pm.boundary, pm.amplitude, s.dt);
        long step = 0;
        for (long stop : stops) {
            for (; step < stop; ++step) {
                try {
                    markers = cd.step(markers);
                } catch (const std::exception& e) {
                    throw std::runtime_error("step " + std::to_string(step) + ": " + e.what());
                }
            }
            res.checkpoints.push_back({markers.time, markers, cd.current_field(), cd.nodes(), spacing});
        }
        res.field = cd.history_field();
        return res;
    }

    res.field = VelocityField::frozen(transport_model(s, res.initial_model));
    std::optional<FlowState> curve;
    if (has_curve) curve = FlowState::at_rest(initial_boundary(s, static_cast<std::size_t>(s.boundary_nodes)), s.dt);
    long step = 0;
    for (long stop : stops) {
        for (; step < stop; ++step) {
            markers = step_flow(markers, res.field);
            if (curve) curve = step_flow(*curve, res.field);
        }
        std::optional<std::vector<Vec2>> boundary;
        if (curve) boundary = curve->positions();
        res.checkpoints.push_back({markers.time, markers, res.field, boundary, spacing});
    }
    return res;
}

/// Band straddling the rightmost boundary point: centre (c.x + a, c.y), half-width 0.1 a.
inline Window default_refinement_band(const Scenario& s) {
    const Vec2 ax = reference_axes(s);
    const Vec2 p = s.model.center + Vec2{ax.x, 0.0};
    const double w = 0.1 * ax.x;
    return {{p.x - w, p.y - w}, {p.x + w, p.y + w}};
}

/// Corrector inputs at t = 0 (Y0, chi0, omega0 with the default floor).
inline CorrectorInput initial_corrector(const Scenario& s, const VorticityModel& model) {
    const FlowState st = initial_state(s, model);
    CorrectorInput in;
    in.Y = initial_Y(s).eval;
    in.chi = initial_chi(s);
    auto shared = std::make_shared<VorticityModel>(model);
    in.omega = [shared](const Vec2& x) { return vorticity(*shared, x); };
    const auto& chi = st.scalar("chi0");
    in.c_floor = std::any_of(chi.begin(), chi.end(), [](double c) { return c > 0.0; }) ? default_c_floor(st) : 0.0;
    return in;
}

}  // namespace vortexlab

// Acceptance criteria 1-9 with PASS/FAIL lines; criterion 10 is reported as EXCLUDED.
// Usage: acceptance [--criterion N]. Exit status is the number of failing criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/fields.hpp"
#include "vortexlab/lemmas.hpp"
#include "vortexlab/transport.hpp"

using namespace vortexlab;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Shear closed form.
Outcome shear_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = VorticityModel::shear(ShearProfile::sine(-1.0, 1.0, 1.0, 1));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(-1.0, 1.0);
    CorrectorInput in{[](const Vec2&) { return Vec2{1.0, 0.0}; }, [](const Vec2&) { return 1.0; },
                      [&](const Vec2& x) { return vorticity(model, x); }, 0.5};
    bool exact = true;
    double gamma = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x{ux(rng), uy(rng)};
        const Mat2 a = matrix_A(in, x);
        exact = exact && a.a11 == 0.0 && a.a12 == -1.0 && a.a21 == 0.0 && a.a22 == 0.0;
        gamma = std::max(gamma, corrected_gradient(model, in, x).norm());
    }
    const double secs = seconds_since(t0);
    return {exact && gamma <= 1e-12 && secs < 1.0,
            std::string("A exact: ") + (exact ? "yes" : "no") + ", max|Gamma| = " + num(gamma) + ", " + num(secs) + " s"};
}

// 2. Radial quadrature vs closed forms.
Outcome radial_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = VorticityModel::circular_patch(1.0);
    const auto& rm = std::get<RadialModel>(model.kind());
    FieldOptions quad;
    quad.route = Route::quadrature;
    double vel = 0.0;
    for (double r : {0.3, 0.5, 2.0, 3.0}) {
        const Vec2 x{r * std::cos(0.4), r * std::sin(0.4)};
        const Vec2 closed = velocity(model, x);
        vel = std::max(vel, distance(velocity(model, x, quad), closed) / closed.norm());
    }
    double inside = 0.0;
    for (const Vec2& x : {Vec2{0.2, 0.1}, Vec2{-0.5, 0.3}, Vec2{0.0, -0.7}}) {
        inside = std::max(inside, distance(grad_velocity(model, x, quad).value, kJ * 0.5));
    }
    CorrectorInput in{YField::unit_tangent().eval, [](const Vec2&) { return 1.0; },
                      [&](const Vec2& x) { return vorticity(model, x); }, 0.5};
    double gamma = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double r = 0.8 + 0.4 * i / 40.0;
        if (std::abs(r - 1.0) < 1e-3) continue;
        for (int k = 0; k < 16; ++k) {
            const double th = kTwoPi * (k + 0.3) / 16.0;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            gamma = std::max(gamma, distance(corrected_gradient(model, in, x, quad), radial_gamma_closed_form(rm, x)));
        }
    }
    const double secs = seconds_since(t0);
    return {vel <= 1e-5 && inside <= 1e-4 && gamma <= 1e-3 && secs < 60.0,
            "velocity rel " + num(vel) + ", inside " + num(inside) + ", Gamma band " + num(gamma) + ", " + num(secs) +
                " s"};
}

// 3. Contour-dynamics stationarity of the circular patch.
Outcome contour_stationarity() {
    ContourDynamics cd(circle_nodes({}, 1.0, 256), 1.0, 1e-3);
    const double a0 = cd.area();
    double radius = 0.0, area = 0.0;
    for (int s = 0; s < 1000; ++s) {
        cd.step();
        for (const auto& p : cd.nodes()) radius = std::max(radius, std::abs(p.norm() - 1.0));
        area = std::max(area, std::abs(cd.area() / a0 - 1.0));
    }
    return {radius <= 1e-4 && area <= 1e-3, "max radius deviation " + num(radius) + ", area drift " + num(area)};
}

// 4. Incompressibility and L^p conservation.
Outcome incompressibility() {
    std::vector<Vec2> grid;
    for (int j = -6; j <= 6; ++j)
        for (int i = -6; i <= 6; ++i) grid.push_back({0.2 * i, 0.2 * j});
    auto rigid = FlowState::at_rest(grid, 1e-2);
    double det_rigid = 0.0;
    const auto field = VelocityField::rigid_rotation();
    for (int s = 0; s < 100; ++s) {
        rigid = step_flow(rigid, field);
        det_rigid = std::max(det_rigid, max_det_deviation(rigid));
    }

    // Elliptical patch, marker weights as polar cells of the mapped disk.
    const double a = 1.0, b = 0.6;
    std::vector<Vec2> pts;
    std::vector<double> w;
    const int rings = 8, per = 32;
    const double ds = 1.4 / rings, dth = kTwoPi / per;
    for (int k = 0; k < rings; ++k)
        for (int j = 0; j < per; ++j) {
            const double s = ds * (k + 0.5), th = dth * (j + 0.5);
            pts.push_back({a * s * std::cos(th), b * s * std::sin(th)});
            w.push_back(a * b * s * ds * dth);
        }
    ContourDynamics cd(ellipse_nodes({}, a, b, 192), 1.0, 1e-2);
    const auto model0 = cd.model();
    auto st = FlowState::at_rest(pts, 1e-2);
    st.scalars["weight"] = w;
    st.add_scalar("omega0", [&](const Vec2& x) { return vorticity(model0, x); });
    const double l1 = lagrangian_lp(st, "omega0", 1.0), l2 = lagrangian_lp(st, "omega0", 2.0);
    const double area0 = cd.area();
    double det_ell = 0.0, lp = 0.0;
    for (int s = 0; s < 100; ++s) {
        st = cd.step(st);
        det_ell = std::max(det_ell, max_det_deviation(st));
        lp = std::max({lp, std::abs(lagrangian_lp(st, "omega0", 1.0) / l1 - 1.0),
                       std::abs(std::sqrt(lagrangian_lp(st, "omega0", 2.0) / l2) - 1.0),
                       std::abs(cd.area() / area0 - 1.0)});
    }
    return {det_rigid <= 1e-6 && det_ell <= 1e-6 && lp <= 1e-3,
            "det dev rigid " + num(det_rigid) + ", ellipse " + num(det_ell) + ", L1/L2/area drift " + num(lp)};
}

// 5. Separation sandwich.
Outcome separation() {
    const auto model = VorticityModel::circular_patch(1.0);
    const auto field = VelocityField::frozen(model);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    std::vector<Vec2> pts;
    for (int i = 0; i < 200; ++i) pts.push_back({u(rng), u(rng)});
    std::vector<Vec2> probe;
    for (int j = -40; j <= 40; ++j)
        for (int i = -40; i <= 40; ++i) probe.push_back({0.05 * i, 0.05 * j});
    auto st = FlowState::at_rest(pts, 1e-2);
    std::vector<double> times{0.0}, V{gradient_sup(field, 0.0, probe)};
    for (int s = 0; s < 100; ++s) {
        st = step_flow(st, field);
        times.push_back(st.time);
        V.push_back(gradient_sup(field, st.time, probe));
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < 100; ++i) pairs.emplace_back(2 * i, 2 * i + 1);
    const auto rep = separation_bounds(st, pairs, times, V);
    return {rep.checked == 100 && rep.violations == 0,
            std::to_string(rep.violations) + " violations of " + std::to_string(rep.checked) + ", int V = " +
                num(rep.integral_V) + ", ratios [" + num(rep.lower_ratio) + ", " + num(rep.upper_ratio) + "]"};
}

// 6. 2x2 reconstruction and bound.
Outcome linear_algebra() {
    const double err = reconstruction_error(random_matrix_pairs(1000, 61));
    const double ratio = bound_ratio(random_matrix_pairs(10000, 62));
    return {err < 1e-10 && ratio <= kSerfatiConstant,
            "reconstruction error " + num(err) + ", fresh max |B|/bound " + num(ratio) + " vs C* " + num(kSerfatiConstant)};
}

// 7. Kernel homogeneity and scale-invariant star norm.
Outcome kernel_lemma() {
    double entry = 0.0, sym = 0.0;
    std::vector<double> stars;
    const auto pairs = log_radius_pairs(2000, 1e-3, 10.0, 71);
    for (double r : {0.5, 1.0, 2.0}) {
        const Mat2 v = cutoff_kernel_pv(r, [](const Vec2&) { return 1.0; }, {}).value;
        entry = std::max(entry, v.norm());
        sym = std::max(sym, v.sym().norm());
        stars.push_back(cutoff_kernel_star_norm(r, pairs));
    }
    const double spread = *std::max_element(stars.begin(), stars.end()) / *std::min_element(stars.begin(), stars.end());
    return {entry <= 1e-8 && spread <= 2.0, "max |entry| " + num(entry) + " (symmetric part " + num(sym) +
                                                "), star-norm spread " + num(spread)};
}

// 8. Regularity dichotomy across the patch boundary.
Outcome refinement() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = VorticityModel::circular_patch(1.0);
    CorrectorInput in{YField::unit_tangent().eval, [](const Vec2&) { return 1.0; },
                      [&](const Vec2& x) { return vorticity(model, x); }, 0.5};
    const Window band{{0.9, -0.1}, {1.1, 0.1}};
    const auto st = boundary_refinement_study(model, in, 0.5, {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512}, band);
    const double secs = seconds_since(t0);
    const double raw = st.rate_raw(), cor = st.rate_corrected();
    return {raw >= 0.4 && raw <= 0.6 && cor >= -0.2 && cor <= 0.2 && secs < 300.0,
            "rate_raw " + num(raw) + ", rate_corrected " + num(cor) + ", " + num(secs) + " s"};
}

// 9. Directional gradient identity.
Outcome directional_identity() {
    const auto model = VorticityModel::gaussian(0.5);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.75, 0.75);
    std::vector<Vec2> pts;
    for (int k = 0; k < 20; ++k) pts.push_back({u(rng), u(rng)});
    std::vector<double> res(2 * pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        res[2 * k] = directional_gradient_identity(model, YField::constant({0.6, -0.8}), pts[k]).residual;
        res[2 * k + 1] = directional_gradient_identity(model, YField::rotational({0.05, 0.0}), pts[k]).residual;
    });
    const double worst = *std::max_element(res.begin(), res.end());
    return {worst <= 1e-6, "max residual " + num(worst) + " over 20 points x 2 Y fields"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
        {"shear closed form", shear_closed_form},
        {"radial quadrature vs closed form", radial_closed_form},
        {"contour-dynamics stationarity", contour_stationarity},
        {"incompressibility and L^p conservation", incompressibility},
        {"flow separation sandwich", separation},
        {"2x2 reconstruction and bound", linear_algebra},
        {"kernel homogeneity and star norm", kernel_lemma},
        {"regularity dichotomy", refinement},
        {"directional gradient identity", directional_identity},
    };
    return list;
}

int run(int c) {
    if (c == 10) {
        std::cout << "criterion 10: EXCLUDED (quantitative constants and doubly-exponential bound; envelope fits are "
                     "reported, not gated)\n";
        return 0;
    }
    const auto& [name, fn] = criteria().at(static_cast<std::size_t>(c - 1));
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << " " << name << " (" << o.detail << ")\n";
    return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            which.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (which.empty())
        for (int c = 1; c <= 10; ++c) which.push_back(c);
    int failures = 0;
    for (int c : which) {
        if (c < 1 || c > 10) {
            std::cerr << "criterion must be 1..10\n";
            return 2;
        }
        failures += run(c);
    }
    return failures;
}

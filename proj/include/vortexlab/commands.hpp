#pragma once
// Command implementations behind the vortexlab tool: simulate, verify, lemmas
// and report. Each returns an exit status (0 pass, 1 check failure); usage and
// scenario errors are thrown as ConfigError / UsageError and mapped to 2.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/fields.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/lemmas.hpp"
#include "vortexlab/scenario.hpp"
#include "vortexlab/transport.hpp"

namespace vortexlab {

class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

struct CheckRow {
    std::string name;
    double value{0.0};
    double tolerance{0.0};
    bool pass{false};
};

/// Named checks with measured value and tolerance.
class CheckTable {
public:
    /// Passes when value <= tolerance.
    void at_most(std::string name, double value, double tolerance) {
        rows_.push_back({std::move(name), value, tolerance, value <= tolerance});
    }
    void add(CheckRow row) { rows_.push_back(std::move(row)); }

    bool all_pass() const {
        return std::all_of(rows_.begin(), rows_.end(), [](const CheckRow& r) { return r.pass; });
    }
    const std::vector<CheckRow>& rows() const { return rows_; }

    void print(std::ostream& os) const {
        std::size_t width = 5;
        for (const auto& r : rows_) width = std::max(width, r.name.size());
        char buf[64];
        os << pad("check", width) << "  " << pad("value", 14) << "  " << pad("tolerance", 14) << "  result\n";
        for (const auto& r : rows_) {
            os << pad(r.name, width) << "  ";
            std::snprintf(buf, sizeof buf, "%14.6e", r.value);
            os << buf << "  ";
            std::snprintf(buf, sizeof buf, "%14.6e", r.tolerance);
            os << buf << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
        }
    }

private:
    static std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); }
    std::vector<CheckRow> rows_;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

/// Writes all files or none: contents go to "<name>.tmp" first, then are renamed.
class AtomicFiles {
public:
    explicit AtomicFiles(std::filesystem::path dir) : dir_(std::move(dir)) {}
    void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }
    void commit() {
        std::filesystem::create_directories(dir_);
        std::vector<std::filesystem::path> tmps;
        for (const auto& [name, text] : files_) {
            const auto tmp = dir_ / (name + ".tmp");
            std::ofstream out(tmp, std::ios::binary);
            out << text;
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
            tmps.push_back(tmp);
        }
        for (std::size_t i = 0; i < files_.size(); ++i) std::filesystem::rename(tmps[i], dir_ / files_[i].first);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline const char* kDiagnosticsHeader =
    "# diagnostics per checkpoint: time = model time; grad_u_sup = ||grad u(t)||_Linf (max-entry norm); "
    "Y_sup, Y_semi = sup and C^alpha seminorm of the pushforward Y(t) on the cutoff band; "
    "Gamma_* = same for grad u - omega A; Ygradu_* = same for (Y.grad)u; area = patch area; "
    "l1, l2, linf = vorticity L^p norms (Lagrangian quadrature); det_dev = max |det grad eta - 1|; "
    "curve_norm = C^{1+alpha} norm of the advected level curve (0 if none)\n";
inline const char* kDiagnosticsColumns =
    "time,grad_u_sup,Y_sup,Y_semi,Gamma_sup,Gamma_semi,Ygradu_sup,Ygradu_semi,area,l1,l2,linf,det_dev,curve_norm\n";

inline std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& recs) {
    std::string out = kDiagnosticsHeader;
    out += kDiagnosticsColumns;
    for (const auto& r : recs) {
        const double vals[] = {r.time, r.grad_u_sup, r.Y_holder.sup_norm, r.Y_holder.seminorm, r.Gamma_holder.sup_norm,
                               r.Gamma_holder.seminorm, r.Ygradu_holder.sup_norm, r.Ygradu_holder.seminorm, r.area,
                               r.lp_norms.l1, r.lp_norms.l2, r.lp_norms.linf, r.det_deviation, r.curve_norm};
        for (std::size_t i = 0; i < std::size(vals); ++i) out += (i ? "," : "") + fmt(vals[i]);
        out += "\n";
    }
    return out;
}

inline std::string trajectories_csv(const std::vector<RunSnapshot>& snaps) {
    std::string out =
        "# marker and level-curve positions per checkpoint: set = marker | curve; det_J = det grad eta (1 for curve nodes)\n"
        "time,set,index,x,y,det_J\n";
    for (const auto& s : snaps) {
        for (std::size_t i = 0; i < s.state.size(); ++i) {
            const auto& m = s.state.markers[i];
            out += fmt(s.time) + ",marker," + std::to_string(i) + "," + fmt(m.position.x) + "," + fmt(m.position.y) +
                   "," + fmt(m.jacobian.det()) + "\n";
        }
        if (s.boundary) {
            for (std::size_t i = 0; i < s.boundary->size(); ++i) {
                const auto& p = (*s.boundary)[i];
                out += fmt(s.time) + ",curve," + std::to_string(i) + "," + fmt(p.x) + "," + fmt(p.y) + "," + fmt(1.0) + "\n";
            }
        }
    }
    return out;
}

inline std::string refinement_csv(const RefinementStudy& st) {
    std::string out =
        "# boundary refinement study: spacing h; raw = C^alpha seminorm of grad u; corrected = same for Gamma = grad u - omega A\n"
        "spacing,raw_seminorm,corrected_seminorm\n";
    for (std::size_t i = 0; i < st.raw.spacings.size(); ++i) {
        out += fmt(st.raw.spacings[i]) + "," + fmt(st.raw.seminorms[i]) + "," + fmt(st.corrected.seminorms[i]) + "\n";
    }
    out += "# rate_raw = " + fmt(st.rate_raw()) + ", rate_corrected = " + fmt(st.rate_corrected()) + "\n";
    return out;
}

inline std::vector<Vec2> polar_samples(Vec2 c, const std::vector<double>& radii, int per) {
    std::vector<Vec2> out;
    for (double r : radii)
        for (int k = 0; k < per; ++k) {
            const double t = kTwoPi * (k + 0.37) / per;
            out.push_back(c + Vec2{r * std::cos(t), r * std::sin(t)});
        }
    return out;
}

}  // namespace detail

struct SimulateOutput {
    RunResult run;
    RegularityCertificate certificate;
    std::optional<RefinementStudy> refinement;
};

/// Runs the scenario and computes all certificate data (no files written).
inline SimulateOutput simulate(const Scenario& s) {
    SimulateOutput out;
    out.run = run_scenario(s);
    CertificateOptions opts;
    opts.budget.seed = s.seed;
    out.certificate = regularity_certificate(out.run.checkpoints, s.alpha, opts);
    if (!s.refinement_spacings.empty()) {
        if (s.model.kind != "radial" && s.model.kind != "patch") {
            throw ConfigError("<scenario>", 0, "refinement.spacings", "refinement studies need a radial or patch model");
        }
        const Window band = s.refinement_band.value_or(default_refinement_band(s));
        PairBudget budget;
        budget.seed = s.seed;
        out.refinement = boundary_refinement_study(out.run.initial_model, initial_corrector(s, out.run.initial_model),
                                                   s.alpha, s.refinement_spacings, band, budget);
    }
    return out;
}

inline int cmd_simulate(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log) {
    SimulateOutput res;
    try {
        res = simulate(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        log << "simulate: numerical failure: " << e.what() << "\n";
        return 1;
    }
    if (!res.certificate.all_finite()) {
        log << "simulate: non-finite certificate entries\n";
        return 1;
    }
    detail::AtomicFiles files(out_dir);
    files.add("diagnostics.csv", detail::diagnostics_csv(res.certificate.records));
    files.add("trajectories.csv", detail::trajectories_csv(res.run.checkpoints));
    if (res.refinement) files.add("refinement.csv", detail::refinement_csv(*res.refinement));
    files.commit();
    log << "simulate: " << s.name << ": " << res.certificate.records.size() << " checkpoints written to "
        << out_dir.string() << "\n";
    return 0;
}

/// Closed-form / quadrature comparisons for stationary radial and shear scenarios.
inline CheckTable verify_stationary(const Scenario& s) {
    CheckTable t;
    const VorticityModel model = build_model(s);
    FieldOptions quad_route;
    quad_route.route = Route::quadrature;

    if (s.model.kind == "shear") {
        const auto& sp = std::get<ShearModel>(model.kind()).profile;
        std::mt19937_64 rng(s.seed);
        std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(sp.c(), sp.d());
        CorrectorInput in{[](const Vec2&) { return Vec2{1.0, 0.0}; }, [](const Vec2&) { return 1.0; },
                          [&](const Vec2& x) { return vorticity(model, x); }, 0.5};
        double a_err = 0.0, g_err = 0.0, id_err = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vec2 x{ux(rng), uy(rng)};
            a_err = std::max(a_err, distance(matrix_A(in, x), Mat2{0.0, -1.0, 0.0, 0.0}));
            g_err = std::max(g_err, corrected_gradient(model, in, x).norm());
            g_err = std::max(g_err, reference_solution(model, x).gamma.norm());
        }
        for (int k = 0; k < 5; ++k) {
            const Vec2 x{ux(rng), uy(rng)};
            id_err = std::max(id_err, directional_gradient_identity(model, YField::constant({1.0, 0.0}), x).residual);
        }
        t.at_most("shear: |A - [[0,-1],[0,0]]| at 100 points", a_err, 0.0);
        t.at_most("shear: |Gamma| at 100 points", g_err, 1e-12);
        t.at_most("shear: directional identity residual", id_err, 1e-8);
        return t;
    }
    if (s.model.kind != "radial") throw UsageError("suite 'stationary' needs a radial or shear scenario");

    const auto& rm = std::get<RadialModel>(model.kind());
    const double R = s.model.radius;
    const Vec2 c = s.model.center;
    for (double f : {0.3, 0.5, 2.0, 3.0}) {
        const Vec2 x = c + Vec2{f * R * std::cos(0.7), f * R * std::sin(0.7)};
        const Vec2 closed = velocity(model, x), quad = velocity(model, x, quad_route);
        char label[96];
        std::snprintf(label, sizeof label, "radial: velocity quadrature vs closed form, r = %g (rel)", f * R);
        t.at_most(label,
                  distance(quad, closed) / closed.norm(), 1e-5);
    }
    if (s.model.inner_radius == 0.0) {
        const auto g = grad_velocity(model, c + Vec2{0.3 * R, 0.2 * R}, quad_route).value;
        t.at_most("radial: grad u inside = (amp/2) J", distance(g, kJ * (0.5 * s.model.amplitude)), 1e-4);
    }
    const Vec2 x2 = c + Vec2{2.0 * R, 0.0};
    t.at_most("radial: PV symmetric part at r = 2R vs closed form",
              distance(pv_symmetric_part(model, x2), radial_gamma_closed_form(rm, x2)), 1e-4);

    CorrectorInput in{YField::unit_tangent(c).eval, [](const Vec2&) { return 1.0; },
                      [&](const Vec2& x) { return vorticity(model, x); }, 0.5};
    double gam = 0.0;
    for (const auto& x : detail::polar_samples(c, {0.8 * R, 0.9 * R, 0.99 * R, 1.01 * R, 1.1 * R, 1.2 * R}, 12)) {
        if (std::abs((x - c).norm() - R) < 1e-3 * R) continue;
        gam = std::max(gam, distance(corrected_gradient(model, in, x, quad_route), radial_gamma_closed_form(rm, x)));
    }
    t.at_most("radial: Gamma (quadrature) vs closed form in 0.8R..1.2R", gam, 1e-3);

    // Stationarity under the frozen field.
    const double T = std::min(s.horizon, 1.0);
    const auto field = VelocityField::frozen(model);
    auto ring = FlowState::at_rest(ellipse_nodes(c, R, R, 64), s.dt);
    ring.add_vector("Y0", YField::unit_tangent(c).eval);
    ring = integrate_flow(ring, field, T);
    double rad = 0.0, ylen = 0.0;
    for (const auto& m : ring.markers) rad = std::max(rad, std::abs((m.position - c).norm() - R));
    for (const auto& v : pushforward_Y(ring).values) ylen = std::max(ylen, std::abs(v.norm() - 1.0));
    t.at_most("radial: boundary markers stay on r = R", rad, 1e-4);
    t.at_most("radial: |Y(t)| = 1 on the boundary", ylen, 1e-4);
    double om = 0.0;
    for (const auto& x : detail::polar_samples(c, {0.5 * R, 0.95 * R, 1.05 * R, 1.5 * R}, 5)) {
        om = std::max(om, std::abs(transport_scalar(field, in.omega, x, T, s.dt) - vorticity(model, x)));
    }
    t.at_most("radial: omega(t) = omega0 (transport)", om, 1e-4);

    Scenario short_run = s;
    short_run.horizon = T;
    short_run.checkpoints = 1;
    short_run.mode = RunMode::frozen;
    CertificateOptions copts;
    copts.budget.seed = s.seed;
    const auto cert = regularity_certificate(run_scenario(short_run).checkpoints, s.alpha, copts);
    double drift = 0.0;
    const auto& a = cert.records.front();
    const auto& b = cert.records.back();
    auto rel = [](double u, double v) { return std::abs(u - v) / std::max(std::abs(u), 1e-300); };
    for (auto [u, v] : {std::pair{a.grad_u_sup, b.grad_u_sup}, std::pair{a.Y_holder.norm(), b.Y_holder.norm()},
                        std::pair{a.Gamma_holder.norm(), b.Gamma_holder.norm()},
                        std::pair{a.Ygradu_holder.norm(), b.Ygradu_holder.norm()}, std::pair{a.area, b.area},
                        std::pair{a.lp_norms.l1, b.lp_norms.l1}, std::pair{a.lp_norms.l2, b.lp_norms.l2}}) {
        if (u != 0.0) drift = std::max(drift, rel(u, v));
    }
    t.at_most("radial: certificate drift over [0, T] (rel)", drift, 1e-2);
    return t;
}

/// Gradient identities for smooth-vorticity scenarios.
inline CheckTable verify_identities(const Scenario& s) {
    if (s.model.kind != "smooth") throw UsageError("suite 'identities' needs a smooth scenario");
    CheckTable t;
    const VorticityModel model = build_model(s);
    const double sig = s.model.sigma;
    const Vec2 c = s.model.center;
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> u(-1.5 * sig, 1.5 * sig);
    std::vector<Vec2> pts;
    for (int k = 0; k < 20; ++k) pts.push_back(c + Vec2{u(rng), u(rng)});

    std::vector<double> r_const(pts.size()), r_rot(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        r_const[k] = directional_gradient_identity(model, YField::constant({0.6, -0.8}), pts[k]).residual;
        r_rot[k] = directional_gradient_identity(model, YField::rotational(c + Vec2{0.1 * sig, 0.0}), pts[k]).residual;
    });
    t.at_most("smooth: directional identity residual, Y constant (20 points)",
              *std::max_element(r_const.begin(), r_const.end()), 1e-6);
    t.at_most("smooth: directional identity residual, Y rotational (20 points)",
              *std::max_element(r_rot.begin(), r_rot.end()), 1e-6);

    double sym = 0.0, split = 0.0, tr = 0.0, anti = 0.0, curl = 0.0;
    FieldOptions quad_route;
    quad_route.route = Route::quadrature;
    for (std::size_t k = 0; k < 6; ++k) {
        const Vec2 x = pts[k];
        const Mat2 p = pv_symmetric_part(model, x);
        sym = std::max({sym, std::abs(p.a12 - p.a21), std::abs(p.trace())});
        const Mat2 g = grad_velocity(model, x).value;
        const double w = vorticity(model, x);
        split = std::max(split, distance(g, kJ * (0.5 * w) + p));
        tr = std::max(tr, std::abs(g.trace()));
        anti = std::max(anti, std::abs(g.antisym().a21 - 0.5 * w));
        const double h = 1e-3;
        const Vec2 ex{h, 0.0}, ey{0.0, h};
        const double fd = (velocity(model, x + ex).y - velocity(model, x - ex).y - velocity(model, x + ey).x +
                           velocity(model, x - ey).x) / (2.0 * h);
        curl = std::max(curl, std::abs(fd - w) / std::max(std::abs(w), 1e-12));
    }
    t.at_most("smooth: PV symmetric part symmetric and traceless", sym, 1e-10);
    t.at_most("smooth: grad u = (omega/2) J + PV symmetric part", split, 1e-6);
    t.at_most("smooth: trace grad u", tr, 1e-8);
    t.at_most("smooth: antisym(grad u)_21 - omega/2", anti, 1e-8);
    t.at_most("smooth: finite-difference curl u vs omega (rel, h = 1e-3)", curl, 1e-3);

    // |u(x)| |x| along a ray approaches the circulation / 2 pi.
    const double total = s.model.amplitude * kPi * sig * sig;
    double decay = 0.0;
    for (double f = 2.0; f <= 40.0; f *= 1.5) {
        const double rr = f * 6.5 * sig;
        const Vec2 x = c + Vec2{rr * std::cos(0.3), rr * std::sin(0.3)};
        decay = std::max(decay, std::abs(velocity(model, x).norm() * rr / (std::abs(total) / kTwoPi) - 1.0));
    }
    t.at_most("smooth: | |u(x)| |x| 2 pi / circulation - 1 | on a far ray", decay, 1e-6);
    return t;
}

inline int cmd_verify(const Scenario& s, const std::string& suite, std::ostream& out) {
    CheckTable t;
    if (suite == "stationary") {
        t = verify_stationary(s);
    } else if (suite == "identities") {
        t = verify_identities(s);
    } else {
        throw UsageError("unknown suite '" + suite + "' (expected stationary or identities)");
    }
    t.print(out);
    return t.all_pass() ? 0 : 1;
}

/// Lemma sweeps sized by `budget` (random ensemble size); budget 0 gives an empty table.
inline CheckTable lemma_table(std::size_t budget, std::uint64_t seed) {
    CheckTable t;
    if (budget == 0) return t;
    t.at_most("2x2 reconstruction: max relative error", reconstruction_error(random_matrix_pairs(budget, seed)), 1e-10);
    const auto cal = calibrate_serfati_constant(std::max<std::size_t>(budget, 1000), seed + 1);
    t.at_most("2x2 bound: recalibrated sup |B|/bound vs frozen C*", cal.polished, kSerfatiConstant);
    t.at_most("2x2 bound: fresh ensemble max |B|/bound vs frozen C*", bound_ratio(random_matrix_pairs(budget, seed + 2)),
              kSerfatiConstant);

    double sym = 0.0, anti = 0.0;
    std::vector<double> stars;
    const auto pairs = log_radius_pairs(2000, 1e-3, 10.0, seed + 3);
    for (double r : {0.5, 1.0, 2.0}) {
        const Mat2 v = cutoff_kernel_pv(r, [](const Vec2&) { return 1.0; }, {0.0, 0.0}).value;
        sym = std::max(sym, v.sym().norm());
        anti = std::max(anti, distance(v.antisym(), kJ * -0.5));
        stars.push_back(cutoff_kernel_star_norm(r, pairs));
    }
    t.at_most("kernel L2 = grad(a_r K) on constants: symmetric part, r = 0.5, 1, 2", sym, 1e-8);
    t.at_most("kernel L2 on constants: antisymmetric part - (-J/2), r = 0.5, 1, 2", anti, 1e-8);
    t.at_most("kernel L2: max/min ||L2||_* over r = 0.5, 1, 2", *std::max_element(stars.begin(), stars.end()) /
                                                                      *std::min_element(stars.begin(), stars.end()),
              2.0);
    const auto hb = holder_bound_check();
    t.at_most("PV Holder bound: [Tf] alpha (1-alpha) / [f] vs calibrated C", hb.ratio, kHolderBoundConstant);
    const MollifierProfile rho(1.0);
    double mass = 0.0;
    for (double eps : {0.1, 0.01}) {
        mass = std::max(mass, std::abs(mollify([](const Vec2&) { return 1.0; }, rho, eps, {0.3, -0.2}) - 1.0));
    }
    t.at_most("mollifier: |mass - 1| for eps = 0.1, 0.01", mass, 1e-10);
    return t;
}

inline int cmd_lemmas(std::size_t budget, std::uint64_t seed, std::ostream& out) {
    const CheckTable t = lemma_table(budget, seed);
    t.print(out);
    return t.all_pass() ? 0 : 1;
}

namespace detail {
inline std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path, std::string& header) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    header.clear();
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header.empty()) {
            header = line;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    if (header.empty()) throw UsageError(path.string() + ": missing column header");
    return rows;
}
}  // namespace detail

/**
 * Plot data from a simulate output directory: a whitespace-separated time
 * series (also relative drift of each column against t = 0) and the envelope
 * fits; the refinement table is re-emitted when present.
 */
inline int cmd_report(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir, std::ostream& log) {
    std::string header;
    const auto rows = detail::read_csv_rows(run_dir / "diagnostics.csv", header);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::string series = "# plot data: columns of diagnostics.csv followed by drift_<name> = value / value(t=0) - 1\n";
    for (std::size_t i = 0; i < cols.size(); ++i) series += (i ? " " : "") + cols[i];
    for (std::size_t i = 1; i < cols.size(); ++i) series += " drift_" + cols[i];
    series += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) series += (i ? " " : "") + detail::fmt(r[i]);
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double base = rows.front()[i];
            series += " " + detail::fmt(base != 0.0 ? r[i] / base - 1.0 : 0.0);
        }
        series += "\n";
    }
    std::string env = "# envelope fits per column: exp: ln s = a + b t; dexp: ln ln(e + s) = a + b t (reported, not asserted)\n"
                      "column exp_a exp_b exp_rms dexp_a dexp_b dexp_rms\n";
    std::vector<double> times;
    for (const auto& r : rows) times.push_back(r[0]);
    for (std::size_t i = 1; i < cols.size() && !rows.empty(); ++i) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[i]);
        const auto f = fit_envelopes(times, v);
        env += cols[i] + " " + detail::fmt(f.exponential.intercept) + " " + detail::fmt(f.exponential.rate) + " " +
               detail::fmt(f.exponential.rms_residual) + " " + detail::fmt(f.double_exponential.intercept) + " " +
               detail::fmt(f.double_exponential.rate) + " " + detail::fmt(f.double_exponential.rms_residual) + "\n";
    }
    detail::AtomicFiles files(out_dir);
    files.add("plot_timeseries.dat", series);
    files.add("plot_envelopes.dat", env);
    if (std::filesystem::exists(run_dir / "refinement.csv")) {
        std::string rh;
        const auto rr = detail::read_csv_rows(run_dir / "refinement.csv", rh);
        std::string table = "# refinement study: spacing raw_seminorm corrected_seminorm\nspacing raw corrected\n";
        for (const auto& r : rr) table += detail::fmt(r[0]) + " " + detail::fmt(r[1]) + " " + detail::fmt(r[2]) + "\n";
        files.add("plot_refinement.dat", table);
    }
    files.commit();
    log << "report: " << rows.size() << " rows written to " << out_dir.string() << "\n";
    return 0;
}

}  // namespace vortexlab

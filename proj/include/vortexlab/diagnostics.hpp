#pragma once
// Corrector matrix A, corrected gradient Gamma = grad u - omega A, per-checkpoint
// regularity certificates and refinement studies across a patch boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/fields.hpp"
#include "vortexlab/geometry.hpp"
#include "vortexlab/holder.hpp"
#include "vortexlab/kernels.hpp"
#include "vortexlab/parallel.hpp"
#include "vortexlab/transport.hpp"

namespace vortexlab {

class FloorViolationError : public std::domain_error {
public:
    explicit FloorViolationError(const std::string& what) : std::domain_error(what) {}
};

/// Y, chi o eta^{-1} and omega seen at time t, plus the floor |Y| >= c_floor on supp chi.
struct CorrectorInput {
    std::function<Vec2(const Vec2&)> Y;
    std::function<double(const Vec2&)> chi;
    std::function<double(const Vec2&)> omega;
    double c_floor{0.0};
};

/// A from the values at one point.
inline Mat2 matrix_A(const Vec2& y, double chi, double c_floor = 0.0) {
    if (chi == 0.0) return {};
    const double y2 = y.norm2();
    if (!(std::sqrt(y2) >= c_floor) || y2 == 0.0) {
        throw FloorViolationError("matrix_A: |Y| = " + std::to_string(std::sqrt(y2)) +
                                  " below the floor " + std::to_string(c_floor) + " where chi > 0");
    }
    return Mat2{y.x * y.y, -y.x * y.x, y.y * y.y, -y.x * y.y} * (chi / y2);
}

/// A = (chi / |Y|^2) [[Y1 Y2, -Y1^2], [Y2^2, -Y1 Y2]].
inline Mat2 matrix_A(const CorrectorInput& in, const Vec2& x) {
    const double chi = in.chi(x);
    if (chi == 0.0) return {};
    return matrix_A(in.Y(x), chi, in.c_floor);
}

inline Mat2 corrected_gradient(const Mat2& grad_u, double omega, const Mat2& A) { return grad_u - A * omega; }

inline Mat2 corrected_gradient(const VorticityModel& model, const CorrectorInput& in, const Vec2& x,
                               const FieldOptions& opts = {}) {
    return corrected_gradient(grad_velocity(model, x, opts).value, in.omega(x), matrix_A(in, x));
}

/// chi0 = 1 where |phi0| <= delta0 / 4, 0 where |phi0| >= delta0 / 2, smooth between.
inline std::function<double(const Vec2&)> level_set_cutoff(const LevelSet& phi0, double delta0) {
    if (!(delta0 > 0.0)) throw std::invalid_argument("level_set_cutoff: delta0 must be positive");
    const CutoffProfile profile{0.25 * delta0};
    auto value = phi0.value;
    return [value, profile](const Vec2& x) { return profile.value(std::abs(value(x))); };
}

/// 0.5 * inf |Y0| over the markers where chi0 > 0.
inline double default_c_floor(const FlowState& state, const std::string& y0 = "Y0",
                              const std::string& chi0 = "chi0") {
    const auto& y = state.vector(y0);
    const auto& chi = state.scalar(chi0);
    SampledField<Vec2> f;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        if (chi[i] > 0.0) f.push_back(state.markers[i].x0, y[i]);
    }
    return 0.5 * inf_norm(f);
}

/// One checkpoint of a run: markers (with omega0, chi0, weight, Y0 labels),
/// the field at that time and, for patches, the ordered boundary.
struct RunSnapshot {
    double time{0.0};
    FlowState state;
    VelocityField field;
    std::optional<std::vector<Vec2>> boundary;
    /// Characteristic marker spacing (for stratified pair sampling).
    double spacing{0.0};
};

struct LpNorms {
    double l1{0.0}, l2{0.0}, linf{0.0};
};

struct DiagnosticsRecord {
    double time{0.0};
    double grad_u_sup{0.0};
    HolderEstimate Y_holder;
    HolderEstimate Gamma_holder;
    HolderEstimate Ygradu_holder;
    double area{0.0};
    LpNorms lp_norms;
    double det_deviation{0.0};
    /// C^{1+alpha} norm of the advected level curve (0 without one).
    double curve_norm{0.0};
};

struct EnvelopeFit {
    double intercept{0.0};
    double rate{0.0};
    double rms_residual{0.0};
};

/// Fits reported for qualitative comparison: ln s = a + b t and ln ln(e + s) = a + b t.
struct EnvelopeSummary {
    EnvelopeFit exponential;
    EnvelopeFit double_exponential;
};

namespace detail {
inline EnvelopeFit line_fit(const std::vector<double>& t, const std::vector<double>& y) {
    EnvelopeFit fit;
    const double n = static_cast<double>(t.size());
    if (t.size() < 2) {
        fit.intercept = y.empty() ? 0.0 : y[0];
        return fit;
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double den = n * stt - st * st;
    fit.rate = den != 0.0 ? (n * sty - st * sy) / den : 0.0;
    fit.intercept = (sy - fit.rate * st) / n;
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.rate * t[i];
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}
}  // namespace detail

inline EnvelopeSummary fit_envelopes(const std::vector<double>& times, const std::vector<double>& series) {
    std::vector<double> ln, lnln;
    for (double s : series) {
        ln.push_back(std::log(std::max(s, std::numeric_limits<double>::min())));
        lnln.push_back(std::log(std::log(std::exp(1.0) + std::max(s, 0.0))));
    }
    return {detail::line_fit(times, ln), detail::line_fit(times, lnln)};
}

struct CertificateOptions {
    PairBudget budget{};
    /// Area from the boundary polygon when present, else from the markers.
    bool prefer_boundary_area{true};
};

/// Certificate values at one checkpoint.
inline DiagnosticsRecord certify_snapshot(const RunSnapshot& snap, double alpha, const CertificateOptions& opts = {}) {
    const auto& st = snap.state;
    const std::size_t n = st.size();
    const auto& omega0 = st.scalar("omega0");
    const auto& chi0 = st.scalar("chi0");
    const auto& y0 = st.vector("Y0");

    std::vector<Mat2> grads(n);
    parallel_for(n, [&](std::size_t i) { grads[i] = snap.field.grad(snap.time, st.markers[i].position); });

    // Y and (Y.grad)u are certified on the cutoff band (supp chi) when it is
    // nonempty, Gamma on every marker.
    const bool banded = std::any_of(chi0.begin(), chi0.end(), [](double c) { return c > 0.0; });
    SampledField<Vec2> yf, ygu;
    SampledField<Mat2> gamma;
    yf.spacing = ygu.spacing = gamma.spacing = snap.spacing;
    DiagnosticsRecord rec;
    rec.time = snap.time;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = st.markers[i].position;
        const Vec2 y = st.markers[i].jacobian * y0[i];
        if (!banded || chi0[i] > 0.0) {
            yf.push_back(p, y);
            ygu.push_back(p, grads[i] * y);
        }
        gamma.push_back(p, corrected_gradient(grads[i], omega0[i], matrix_A(y, chi0[i])));
        rec.grad_u_sup = std::max(rec.grad_u_sup, grads[i].norm());
    }
    rec.Y_holder = holder_estimate(yf, alpha, opts.budget);
    rec.Gamma_holder = holder_estimate(gamma, alpha, opts.budget);
    rec.Ygradu_holder = holder_estimate(ygu, alpha, opts.budget);

    const auto& w = st.scalar("weight");
    double marker_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = st.markers[i].jacobian.det();
        if (omega0[i] != 0.0) marker_area += w[i] * d;
        rec.lp_norms.l1 += std::abs(omega0[i]) * w[i] * d;
        rec.lp_norms.l2 += omega0[i] * omega0[i] * w[i] * d;
        rec.lp_norms.linf = std::max(rec.lp_norms.linf, std::abs(omega0[i]));
        rec.det_deviation = std::max(rec.det_deviation, std::abs(d - 1.0));
    }
    rec.lp_norms.l2 = std::sqrt(rec.lp_norms.l2);
    rec.area = (opts.prefer_boundary_area && snap.boundary) ? ClosedCurve(*snap.boundary, false).signed_area()
                                                            : marker_area;
    if (snap.boundary && snap.boundary->size() >= 8) {
        rec.curve_norm = curve_c1alpha_norm(ClosedCurve(*snap.boundary, false), alpha).norm();
    }
    return rec;
}

struct RegularityCertificate {
    std::vector<DiagnosticsRecord> records;
    EnvelopeSummary Y_envelope;
    EnvelopeSummary grad_u_envelope;

    bool all_finite() const {
        for (const auto& r : records) {
            for (double v : {r.grad_u_sup, r.Y_holder.norm(), r.Gamma_holder.norm(), r.Ygradu_holder.norm(), r.area,
                             r.lp_norms.l1, r.lp_norms.l2, r.lp_norms.linf}) {
                if (!std::isfinite(v)) return false;
            }
        }
        return true;
    }
};

inline RegularityCertificate regularity_certificate(const std::vector<RunSnapshot>& run, double alpha,
                                                    const CertificateOptions& opts = {}) {
    RegularityCertificate cert;
    std::vector<double> t, ys, gs;
    for (const auto& snap : run) {
        if (!cert.records.empty() && !(snap.time > cert.records.back().time)) {
            throw std::invalid_argument("regularity_certificate: checkpoint times must increase");
        }
        cert.records.push_back(certify_snapshot(snap, alpha, opts));
        t.push_back(snap.time);
        ys.push_back(cert.records.back().Y_holder.norm());
        gs.push_back(cert.records.back().grad_u_sup);
    }
    cert.Y_envelope = fit_envelopes(t, ys);
    cert.grad_u_envelope = fit_envelopes(t, gs);
    return cert;
}

/// Axis-aligned sampling window.
struct Window {
    Vec2 lo{-1.0, -1.0};
    Vec2 hi{1.0, 1.0};

    /// Grid with spacing h anchored at lo (the last row/column may fall short of hi).
    std::vector<Vec2> grid(double h) const {
        if (!(h > 0.0) || !(hi.x > lo.x) || !(hi.y > lo.y)) throw std::invalid_argument("Window::grid: bad window");
        const auto nx = static_cast<std::size_t>(std::floor((hi.x - lo.x) / h + 1e-9)) + 1;
        const auto ny = static_cast<std::size_t>(std::floor((hi.y - lo.y) / h + 1e-9)) + 1;
        std::vector<Vec2> pts;
        pts.reserve(nx * ny);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) pts.push_back({lo.x + h * i, lo.y + h * j});
        return pts;
    }
};

struct RefinementStudy {
    RefinementRate raw;
    RefinementRate corrected;
    double rate_raw() const { return raw.rate; }
    double rate_corrected() const { return corrected.rate; }
};

/**
 * Refinement rates of the C^alpha seminorm of grad u and of Gamma on grids of
 * a band window straddling the boundary: about alpha for a field that jumps,
 * about 0 for a Holder field.
 */
inline RefinementStudy boundary_refinement_study(const VorticityModel& model, const CorrectorInput& in, double alpha,
                                                 const std::vector<double>& spacings, const Window& band,
                                                 const PairBudget& budget = {}, const FieldOptions& opts = {}) {
    auto sample = [&](double h, bool corrected) {
        const auto pts = band.grid(h);
        SampledField<Mat2> f;
        f.spacing = h;
        f.points = pts;
        f.values.resize(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            const Mat2 g = grad_velocity(model, pts[i], opts).value;
            f.values[i] = corrected ? corrected_gradient(g, in.omega(pts[i]), matrix_A(in, pts[i])) : g;
        });
        return f;
    };
    RefinementStudy out;
    out.raw = seminorm_refinement_rate([&](double h) { return sample(h, false); }, alpha, spacings, budget);
    out.corrected = seminorm_refinement_rate([&](double h) { return sample(h, true); }, alpha, spacings, budget);
    return out;
}

/// C^{1+alpha} norm of the advected level curve at each checkpoint.
inline std::vector<CurveRegularity> level_set_regularity(const std::vector<RunSnapshot>& run, double alpha) {
    std::vector<CurveRegularity> out;
    for (const auto& snap : run) {
        if (!snap.boundary) throw CurveError("level_set_regularity: checkpoint carries no level curve");
        out.push_back(curve_c1alpha_norm(ClosedCurve(*snap.boundary), alpha));
    }
    return out;
}

}  // namespace vortexlab

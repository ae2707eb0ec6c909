#pragma once
/**
 * @file holder.hpp
 * @brief Discrete estimators of L-infinity, Holder seminorms, the inf "norm",
 *        curve C^{1+alpha} norms and seminorm refinement rates.
 *
 * Values may be scalars, vectors (Euclidean magnitude) or matrices
 * (max-entry magnitude). All seminorms are maxima of
 * |f(x) - f(y)| / |x - y|^alpha over a pair set; with exhaustive pairs the
 * estimate can only grow when points are added.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vortexlab/geometry.hpp"

namespace vortexlab {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Vec2& v) { return v.norm(); }
inline double magnitude(const Mat2& m) { return m.norm(); }

class EmptySampleError : public std::invalid_argument {
public:
    explicit EmptySampleError(const std::string& what) : std::invalid_argument(what) {}
};

class CurveError : public std::invalid_argument {
public:
    explicit CurveError(const std::string& what) : std::invalid_argument(what) {}
};

/// Values sampled at distinct points; `spacing` is the characteristic grid spacing.
template <class T>
struct SampledField {
    std::vector<Vec2> points;
    std::vector<T> values;
    double spacing{0.0};

    std::size_t size() const { return points.size(); }
    void push_back(const Vec2& p, const T& v) {
        points.push_back(p);
        values.push_back(v);
    }
    void validate() const {
        if (points.size() != values.size()) {
            throw std::invalid_argument("SampledField: points and values differ in length");
        }
        std::vector<Vec2> sorted = points;
        auto less = [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
        std::sort(sorted.begin(), sorted.end(), less);
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i].x == sorted[i - 1].x && sorted[i].y == sorted[i - 1].y) {
                throw std::invalid_argument("SampledField: repeated sample point");
            }
        }
    }
};

struct HolderEstimate {
    double sup_norm{0.0};
    double seminorm{0.0};
    double alpha{0.5};
    std::size_t pair_count{0};

    double norm() const { return sup_norm + seminorm; }
};

/// Pair enumeration budget. Above `exhaustive_limit` pairs, all pairs closer
/// than near_factor * spacing are kept plus `far_pairs` seeded random pairs.
struct PairBudget {
    std::size_t exhaustive_limit{2'000'000};
    std::size_t far_pairs{200'000};
    double near_factor{2.5};
    std::uint64_t seed{0x5eedULL};
};

template <class T>
double sup_norm(const SampledField<T>& field) {
    field.validate();
    if (field.size() == 0) throw EmptySampleError("sup_norm: empty sample");
    double m = 0.0;
    for (const auto& v : field.values) m = std::max(m, magnitude(v));
    return m;
}

/// min |f| over the sample, optionally restricted to points where mask(x) holds.
template <class T>
double inf_norm(const SampledField<T>& field,
                const std::function<bool(const Vec2&)>& mask = nullptr) {
    field.validate();
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (mask && !mask(field.points[i])) continue;
        any = true;
        m = std::min(m, magnitude(field.values[i]));
    }
    if (!any) throw EmptySampleError("inf_norm: empty (masked) sample");
    return m;
}

namespace detail {
inline void check_alpha(double alpha, const char* op) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument(std::string(op) + ": alpha must lie in (0, 1)");
    }
}

template <class T>
double quotient(const SampledField<T>& f, std::size_t i, std::size_t j, double alpha) {
    const double d = (f.points[i] - f.points[j]).norm();
    if (d == 0.0) return 0.0;
    return magnitude(f.values[i] - f.values[j]) / std::pow(d, alpha);
}

struct CellKey {
    std::int64_t i, j;
    bool operator==(const CellKey&) const = default;
};
struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        return std::hash<std::int64_t>()(k.i * 73856093LL ^ k.j * 19349663LL);
    }
};
}  // namespace detail

template <class T>
HolderEstimate holder_estimate(const SampledField<T>& field, double alpha,
                               const PairBudget& budget = {}) {
    detail::check_alpha(alpha, "holder_seminorm");
    field.validate();
    const std::size_t n = field.size();
    if (n < 2) throw EmptySampleError("holder_seminorm: need at least two points");

    HolderEstimate est;
    est.alpha = alpha;
    est.sup_norm = sup_norm(field);
    const std::size_t total = n * (n - 1) / 2;
    if (total <= budget.exhaustive_limit) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                est.seminorm = std::max(est.seminorm, detail::quotient(field, i, j, alpha));
            }
        }
        est.pair_count = total;
        return est;
    }

    if (!(field.spacing > 0.0)) {
        throw std::invalid_argument("holder_seminorm: stratified sampling needs a positive spacing");
    }
    const double cell = budget.near_factor * field.spacing;
    std::unordered_map<detail::CellKey, std::vector<std::size_t>, detail::CellHash> grid;
    grid.reserve(n);
    auto key_of = [cell](const Vec2& p) {
        return detail::CellKey{static_cast<std::int64_t>(std::floor(p.x / cell)),
                               static_cast<std::int64_t>(std::floor(p.y / cell))};
    };
    for (std::size_t i = 0; i < n; ++i) grid[key_of(field.points[i])].push_back(i);

    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = key_of(field.points[i]);
        for (std::int64_t di = -1; di <= 1; ++di) {
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                auto it = grid.find({k.i + di, k.j + dj});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i) continue;
                    if ((field.points[i] - field.points[j]).norm() > cell) continue;
                    est.seminorm = std::max(est.seminorm, detail::quotient(field, i, j, alpha));
                    ++pairs;
                }
            }
        }
    }
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < budget.far_pairs; ++s) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        est.seminorm = std::max(est.seminorm, detail::quotient(field, i, j, alpha));
        ++pairs;
    }
    est.pair_count = pairs;
    return est;
}

template <class T>
double holder_seminorm(const SampledField<T>& field, double alpha, const PairBudget& budget = {}) {
    return holder_estimate(field, alpha, budget).seminorm;
}

/// Closed polygonal curve; the closing segment runs from the last node to the first.
class ClosedCurve {
public:
    explicit ClosedCurve(std::vector<Vec2> nodes, bool check_simple = true)
        : nodes_(std::move(nodes)) {
        if (nodes_.size() < 3) throw CurveError("ClosedCurve: need at least three nodes");
        arclength_.resize(nodes_.size() + 1, 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double len = (node(i + 1) - node(i)).norm();
            if (!(len > 0.0)) throw CurveError("ClosedCurve: repeated node / zero-length segment");
            arclength_[i + 1] = arclength_[i] + len;
        }
        if (check_simple && !is_simple()) throw CurveError("ClosedCurve: curve self-intersects");
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    /// Cyclic node access.
    const Vec2& node(std::size_t i) const { return nodes_[i % nodes_.size()]; }
    double length() const { return arclength_.back(); }
    /// Cumulative chord length at node i (0 at node 0).
    double arclength(std::size_t i) const { return arclength_[i]; }

    /// Signed (shoelace) area; positive for counter-clockwise orientation.
    double signed_area() const {
        double a = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) a += cross(node(i), node(i + 1));
        return 0.5 * a;
    }

    bool is_simple() const {
        const std::size_t n = nodes_.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;  // adjacent through the closing segment
                if (segments_cross(node(i), node(i + 1), node(j), node(j + 1))) return false;
            }
        }
        return true;
    }

private:
    static bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
        const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
        const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
               d3 != 0 && d4 != 0;
    }

    std::vector<Vec2> nodes_;
    std::vector<double> arclength_;
};

struct CurveRegularity {
    double tangent_sup{0.0};
    double tangent_seminorm{0.0};
    double norm() const { return tangent_sup + tangent_seminorm; }
};

/// Centered chord-difference tangents over arc length, Holder seminorm in the
/// periodic arc-length distance.
inline CurveRegularity curve_c1alpha_norm(const ClosedCurve& curve, double alpha) {
    detail::check_alpha(alpha, "curve_c1alpha_norm");
    const std::size_t n = curve.size();
    if (n < 8) throw CurveError("curve_c1alpha_norm: need at least eight nodes");
    const double total = curve.length();
    std::vector<Vec2> tangent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& next = curve.node(i + 1);
        const Vec2& prev = curve.node(i + n - 1);
        const double ds = (next - curve.node(i)).norm() + (curve.node(i) - prev).norm();
        tangent[i] = (next - prev) / ds;
    }
    CurveRegularity out;
    for (std::size_t i = 0; i < n; ++i) {
        out.tangent_sup = std::max(out.tangent_sup, tangent[i].norm());
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = curve.arclength(j) - curve.arclength(i);
            d = std::min(d, total - d);
            out.tangent_seminorm =
                std::max(out.tangent_seminorm, (tangent[i] - tangent[j]).norm() / std::pow(d, alpha));
        }
    }
    return out;
}

/// Open-curve variant: one-sided chords at the end nodes, plain arc-length distance.
inline CurveRegularity open_curve_c1alpha_norm(const std::vector<Vec2>& nodes, double alpha) {
    detail::check_alpha(alpha, "open_curve_c1alpha_norm");
    const std::size_t n = nodes.size();
    if (n < 3) throw CurveError("open_curve_c1alpha_norm: need at least three nodes");
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double len = (nodes[i] - nodes[i - 1]).norm();
        if (!(len > 0.0)) throw CurveError("open_curve_c1alpha_norm: zero-length segment");
        s[i] = s[i - 1] + len;
    }
    std::vector<Vec2> tangent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == n ? i : i + 1;
        tangent[i] = (nodes[hi] - nodes[lo]) / (s[hi] - s[lo]);
    }
    CurveRegularity out;
    for (std::size_t i = 0; i < n; ++i) {
        out.tangent_sup = std::max(out.tangent_sup, tangent[i].norm());
        for (std::size_t j = i + 1; j < n; ++j) {
            out.tangent_seminorm = std::max(
                out.tangent_seminorm, (tangent[i] - tangent[j]).norm() / std::pow(s[j] - s[i], alpha));
        }
    }
    return out;
}

struct RefinementRate {
    double rate{0.0};
    /// Set when some seminorm was zero; the rate is then 0 by convention.
    bool zero_seminorm{false};
    std::vector<double> spacings;
    std::vector<double> seminorms;
};

/// Least-squares slope of log(seminorm) against log(1/h).
inline RefinementRate fit_refinement_rate(const std::vector<double>& spacings,
                                          const std::vector<double>& seminorms) {
    if (spacings.size() < 3 || spacings.size() != seminorms.size()) {
        throw std::invalid_argument("seminorm_refinement_rate: need at least three spacings");
    }
    for (std::size_t i = 1; i < spacings.size(); ++i) {
        if (!(spacings[i] < spacings[i - 1])) {
            throw std::invalid_argument("seminorm_refinement_rate: spacings must decrease");
        }
    }
    RefinementRate out;
    out.spacings = spacings;
    out.seminorms = seminorms;
    for (double s : seminorms) {
        if (!(s > 0.0)) {
            out.zero_seminorm = true;
            return out;
        }
    }
    const double n = static_cast<double>(spacings.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < spacings.size(); ++i) {
        const double x = std::log(1.0 / spacings[i]), y = std::log(seminorms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

template <class Generator>
RefinementRate seminorm_refinement_rate(Generator&& field_at_spacing, double alpha,
                                        const std::vector<double>& spacings,
                                        const PairBudget& budget = {}) {
    detail::check_alpha(alpha, "seminorm_refinement_rate");
    if (spacings.size() < 3) {
        throw std::invalid_argument("seminorm_refinement_rate: need at least three spacings");
    }
    std::vector<double> seminorms;
    seminorms.reserve(spacings.size());
    for (double h : spacings) {
        seminorms.push_back(holder_seminorm(field_at_spacing(h), alpha, budget));
    }
    return fit_refinement_rate(spacings, seminorms);
}

}  // namespace vortexlab

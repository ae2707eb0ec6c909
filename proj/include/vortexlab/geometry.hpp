#pragma once
/**
 * @file geometry.hpp
 * @brief Plane vectors, 2x2 matrices and the symmetric-matrix bound used to
 *        control velocity gradients through a single column.
 *
 * Conventions:
 *   - |v| for a Vec2 is the Euclidean norm.
 *   - |M| for a Mat2 is the max-entry norm, so |I| = 1.
 *   - v.perp() = (-v.y, v.x).
 *   - For a vector field u, grad u has entries (grad u)(i, j) = d_j u_i, so
 *     (Y . grad) u = (grad u) * Y.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace vortexlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr Vec2 perp() const { return {-y, x}; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return v.norm(); }

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
}

/// Row-major 2x2 matrix: [[a11, a12], [a21, a22]].
struct Mat2 {
    double a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

    constexpr Mat2() = default;
    constexpr Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }
    /// Matrix whose columns are c1 and c2.
    static constexpr Mat2 from_columns(const Vec2& c1, const Vec2& c2) {
        return {c1.x, c2.x, c1.y, c2.y};
    }
    /// Outer product a b^T.
    static constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
        return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
    }

    constexpr double operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
    }

    constexpr Mat2 operator+(const Mat2& r) const {
        return {a11 + r.a11, a12 + r.a12, a21 + r.a21, a22 + r.a22};
    }
    constexpr Mat2 operator-(const Mat2& r) const {
        return {a11 - r.a11, a12 - r.a12, a21 - r.a21, a22 - r.a22};
    }
    constexpr Mat2 operator-() const { return {-a11, -a12, -a21, -a22}; }
    constexpr Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    constexpr Mat2 operator/(double s) const { return {a11 / s, a12 / s, a21 / s, a22 / s}; }
    constexpr Mat2& operator+=(const Mat2& r) { return *this = *this + r; }
    constexpr Mat2& operator-=(const Mat2& r) { return *this = *this - r; }
    constexpr Mat2& operator*=(double s) { return *this = *this * s; }
    constexpr bool operator==(const Mat2&) const = default;

    constexpr Mat2 operator*(const Mat2& r) const {
        return {a11 * r.a11 + a12 * r.a21, a11 * r.a12 + a12 * r.a22,
                a21 * r.a11 + a22 * r.a21, a21 * r.a12 + a22 * r.a22};
    }
    constexpr Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }

    constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }
    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr double trace() const { return a11 + a22; }
    constexpr Vec2 col(int j) const { return j == 0 ? Vec2{a11, a21} : Vec2{a12, a22}; }
    constexpr Mat2 sym() const { return (*this + transpose()) * 0.5; }
    constexpr Mat2 antisym() const { return (*this - transpose()) * 0.5; }

    /// Max-entry norm.
    double norm() const {
        return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
    }
    /// Largest singular value.
    double spectral_norm() const {
        const double s = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
        const double d = std::abs(det());
        const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * d * d));
        return std::sqrt(0.5 * (s + disc));
    }
};

constexpr Mat2 operator*(double s, const Mat2& m) { return m * s; }
inline double mat_norm(const Mat2& m) { return m.norm(); }
inline double norm(const Mat2& m) { return m.norm(); }

/// Rotation generator [[0, -1], [1, 0]]; (omega/2) J is the antisymmetric part of grad u.
inline constexpr Mat2 kJ{0.0, -1.0, 1.0, 0.0};

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a11 << ", " << m.a12 << "], [" << m.a21 << ", " << m.a22 << "]]";
}

/// Rotation by angle theta.
inline Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

class DegenerateMatrixError : public std::domain_error {
public:
    explicit DegenerateMatrixError(const std::string& what) : std::domain_error(what) {}
};

/// |det M| below this is treated as singular by the lemma operations.
inline constexpr double kDegenerateDet = 1e-8;

namespace detail {
inline void require_nondegenerate(const Mat2& m, const char* op) {
    const double d = m.det();
    if (!(std::abs(d) >= kDegenerateDet)) {
        throw DegenerateMatrixError(std::string(op) + ": |det M| = " + std::to_string(std::abs(d)) +
                                    " below threshold");
    }
}
}  // namespace detail

/**
 * Evaluates B = E E^T B M F / det(M E) with E = [[a, -c], [c, a]] and
 * F = [[d, -b], [-c, a]] for M = [[a, b], [c, d]], by literal matrix products.
 * The result equals B for any B; the interesting part is the factorisation
 * through the column M_1 = (a, c).
 */
inline Mat2 serfati_reconstruct(const Mat2& b, const Mat2& m) {
    detail::require_nondegenerate(m, "serfati_reconstruct");
    const Mat2 e{m.a11, -m.a21, m.a21, m.a11};
    const Mat2 f{m.a22, -m.a12, -m.a21, m.a11};
    const double denom = (m * e).det();
    if (!(std::abs(denom) > 0.0)) {
        throw DegenerateMatrixError("serfati_reconstruct: det(M E) vanishes (zero first column)");
    }
    return (e * e.transpose() * b * m * f) / denom;
}

/**
 * Right-hand side (without the constant) of |B| <= C (|M| / det M) |B M_1| + C |tr B|.
 * |B M_1| is Euclidean, |M| is max-entry. Requires det M > 0.
 */
inline double serfati_bound(const Mat2& b, const Mat2& m) {
    detail::require_nondegenerate(m, "serfati_bound");
    const double d = m.det();
    if (d <= 0.0) {
        throw DegenerateMatrixError("serfati_bound: det M must be positive");
    }
    return (m.norm() / d) * (b * m.col(0)).norm() + std::abs(b.trace());
}

/// Max-entry distance between two matrices.
inline double distance(const Mat2& a, const Mat2& b) { return (a - b).norm(); }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace vortexlab

#include <gtest/gtest.h>

#include <random>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/fields.hpp"
#include "vortexlab/holder.hpp"

using namespace vortexlab;

namespace {

/// n x n grid of [0,1]^2 with f values.
template <class F>
auto unit_square(int n, F&& f) {
    SampledField<std::decay_t<decltype(f(Vec2{}))>> out;
    out.spacing = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p{i * out.spacing, j * out.spacing};
            out.push_back(p, f(p));
        }
    return out;
}

std::vector<Vec2> square_nodes(int per_side) {
    std::vector<Vec2> out;
    const Vec2 corners[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < per_side; ++k) {
            const double t = static_cast<double>(k) / per_side;
            out.push_back(corners[s] * (1 - t) + corners[(s + 1) % 4] * t);
        }
    return out;
}

}  // namespace

TEST(SupNorm, Examples) {
    EXPECT_EQ(sup_norm(unit_square(5, [](const Vec2&) { return 3.0; })), 3.0);
    EXPECT_DOUBLE_EQ(sup_norm(unit_square(9, [](const Vec2& p) { return p.x; })), 1.0);
    EXPECT_EQ(sup_norm(unit_square(4, [](const Vec2&) { return 0.0; })), 0.0);
    EXPECT_THROW(sup_norm(SampledField<double>{}), EmptySampleError);
}

TEST(SupNorm, VectorAndMatrixMagnitudes) {
    SampledField<Vec2> v;
    v.push_back({0, 0}, {3.0, 4.0});
    EXPECT_DOUBLE_EQ(sup_norm(v), 5.0);
    SampledField<Mat2> m;
    m.push_back({0, 0}, Mat2{1.0, -3.0, 2.0, 0.5});
    EXPECT_DOUBLE_EQ(sup_norm(m), 3.0);
}

TEST(SampledField, ValidationRejectsBadSamples) {
    SampledField<double> f;
    f.points = {{0, 0}, {1, 0}};
    f.values = {1.0};
    EXPECT_THROW(f.validate(), std::invalid_argument);
    f.values = {1.0, 2.0};
    f.points[1] = f.points[0];
    EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(HolderSeminorm, Examples) {
    EXPECT_EQ(holder_seminorm(unit_square(6, [](const Vec2&) { return 2.0; }), 0.5), 0.0);
    EXPECT_NEAR(holder_seminorm(unit_square(11, [](const Vec2& p) { return p.x; }), 0.5), 1.0, 1e-12);
    SampledField<double> line;
    line.spacing = 0.01;
    for (int i = -50; i <= 50; ++i) line.push_back({0.01 * i, 0.0}, std::sqrt(std::abs(0.01 * i)));
    EXPECT_GE(holder_seminorm(line, 0.5), 1.0 - 1e-12);
}

TEST(HolderSeminorm, RejectsAlphaOutsideUnitInterval) {
    const auto f = unit_square(3, [](const Vec2& p) { return p.x; });
    EXPECT_THROW(holder_seminorm(f, 0.0), std::invalid_argument);
    EXPECT_THROW(holder_seminorm(f, 1.0), std::invalid_argument);
    EXPECT_THROW(holder_seminorm(f, -0.3), std::invalid_argument);
}

TEST(HolderSeminorm, MonotoneUnderEnrichment) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto f = [](const Vec2& p) { return std::sin(3.0 * p.x) * std::abs(p.y) + (p.x > 0.1 ? 0.3 : 0.0); };
    SampledField<double> s;
    s.spacing = 0.1;
    double prev = 0.0;
    for (int k = 0; k < 300; ++k) {
        const Vec2 p{u(rng), u(rng)};
        s.push_back(p, f(p));
        if (s.size() < 2) continue;
        const double cur = holder_seminorm(s, 0.5);
        EXPECT_GE(cur, prev);
        prev = cur;
    }
}

TEST(HolderSeminorm, BudgetedSamplingKeepsNearPairs) {
    const auto jump = unit_square(60, [](const Vec2& p) { return p.x > 0.5 ? 1.0 : 0.0; });
    const double full = holder_seminorm(jump, 0.5);
    PairBudget small;
    small.exhaustive_limit = 1000;
    small.far_pairs = 2000;
    const double sampled = holder_seminorm(jump, 0.5, small);
    EXPECT_LE(sampled, full + 1e-12);
    EXPECT_NEAR(sampled, full, 1e-12);
}

TEST(HolderEstimate, RecordsBothParts) {
    const auto f = unit_square(11, [](const Vec2& p) { return 2.0 * p.y; });
    const auto e = holder_estimate(f, 0.5);
    EXPECT_DOUBLE_EQ(e.sup_norm, 2.0);
    EXPECT_NEAR(e.seminorm, 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(e.norm(), e.sup_norm + e.seminorm);
    EXPECT_EQ(e.pair_count, 121u * 120u / 2u);
}

TEST(HolderInequalities, Composition) {
    // seminorm(f o g) <= seminorm(f) Lip(g)^alpha on the image of the same pairs.
    const double alpha = 0.4;
    auto g = [](const Vec2& p) { return Vec2{p.x + 0.3 * std::sin(p.y), 0.5 * p.y + 0.2 * p.x * p.x}; };
    auto f = [](const Vec2& q) { return std::sqrt(std::abs(q.x - 0.4)) + q.y; };
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SampledField<double> fg, f_on_image;
    std::vector<Vec2> pts;
    for (int k = 0; k < 250; ++k) {
        const Vec2 p{u(rng), u(rng)};
        pts.push_back(p);
        fg.push_back(p, f(g(p)));
        f_on_image.push_back(g(p), f(g(p)));
    }
    double lip = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            lip = std::max(lip, (g(pts[i]) - g(pts[j])).norm() / (pts[i] - pts[j]).norm());
    EXPECT_LE(holder_seminorm(fg, alpha), holder_seminorm(f_on_image, alpha) * std::pow(lip, alpha) * (1 + 1e-12));
}

TEST(HolderInequalities, Product) {
    const double alpha = 0.5;
    auto f = [](const Vec2& p) { return std::cos(4.0 * p.x) + 0.5; };
    auto g = [](const Vec2& p) { return std::sqrt(std::abs(p.y - 0.3)) - 0.2 * p.x; };
    const auto sf = unit_square(15, f), sg = unit_square(15, g);
    const auto sfg = unit_square(15, [&](const Vec2& p) { return f(p) * g(p); });
    EXPECT_LE(holder_estimate(sfg, alpha).norm(),
              holder_estimate(sf, alpha).norm() * holder_estimate(sg, alpha).norm() * (1 + 1e-12));
}

TEST(InfNorm, Examples) {
    EXPECT_DOUBLE_EQ(inf_norm(unit_square(4, [](const Vec2&) { return -2.5; })), 2.5);
    EXPECT_EQ(inf_norm(unit_square(5, [](const Vec2& p) { return p.x - 0.5; })), 0.0);
    SampledField<Vec2> annulus;
    const auto tangent = YField::unit_tangent();
    for (double r : {0.8, 1.0, 1.2})
        for (int k = 0; k < 64; ++k) {
            const Vec2 p = Vec2{std::cos(0.1 * k), std::sin(0.1 * k)} * r;
            annulus.push_back(p, tangent(p));
        }
    EXPECT_NEAR(inf_norm(annulus), 1.0, 1e-15);
    EXPECT_THROW(inf_norm(SampledField<double>{}), EmptySampleError);
}

TEST(InfNorm, MaskRestrictsTheSample) {
    const auto f = unit_square(11, [](const Vec2& p) { return p.x; });
    EXPECT_NEAR(inf_norm(f, [](const Vec2& p) { return p.x > 0.45; }), 0.5, 1e-15);
    EXPECT_THROW(inf_norm(f, [](const Vec2&) { return false; }), EmptySampleError);
}

TEST(ClosedCurve, RejectsDegenerateAndSelfIntersecting) {
    EXPECT_THROW(ClosedCurve({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), CurveError);
    EXPECT_THROW(ClosedCurve({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), CurveError);
    EXPECT_NO_THROW(ClosedCurve({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    EXPECT_NEAR(ClosedCurve({{0, 0}, {1, 0}, {1, 1}, {0, 1}}).signed_area(), 1.0, 1e-15);
}

TEST(CurveNorm, StraightSegmentHasZeroSeminorm) {
    std::vector<Vec2> seg;
    for (int i = 0; i <= 20; ++i) seg.push_back({0.3 + 0.05 * i, -0.1 + 0.02 * i});
    const auto reg = open_curve_c1alpha_norm(seg, 0.5);
    EXPECT_NEAR(reg.tangent_seminorm, 0.0, 1e-12);
    EXPECT_NEAR(reg.tangent_sup, 1.0, 1e-12);
}

TEST(CurveNorm, UnitCircleMatchesBruteForce) {
    const std::size_t n = 256;
    const auto reg = curve_c1alpha_norm(ClosedCurve(circle_nodes({}, 1.0, n)), 0.5);
    double brute = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = kTwoPi * static_cast<double>(j - i) / n;
            d = std::min(d, kTwoPi - d);
            brute = std::max(brute, 2.0 * std::abs(std::sin(kPi * static_cast<double>(j - i) / n)) / std::sqrt(d));
        }
    EXPECT_NEAR(reg.tangent_seminorm / brute, 1.0, 0.02);
}

TEST(CurveNorm, SquareCornersGrowUnderRefinement) {
    const double coarse = curve_c1alpha_norm(ClosedCurve(square_nodes(16)), 0.5).tangent_seminorm;
    const double fine = curve_c1alpha_norm(ClosedCurve(square_nodes(64)), 0.5).tangent_seminorm;
    // 64 -> 256 nodes is two halvings: growth >= 2^(0.5 * 2).
    EXPECT_GE(fine / coarse, 2.0 - 1e-9);
}

TEST(CurveNorm, RequiresEightNodes) {
    EXPECT_THROW(curve_c1alpha_norm(ClosedCurve(circle_nodes({}, 1.0, 6)), 0.5), CurveError);
}

TEST(RefinementRate, SmoothFieldRateNearZero) {
    auto gen = [](double h) {
        SampledField<double> f;
        f.spacing = h;
        for (const auto& p : Window{{0.0, 0.0}, {0.5, 0.5}}.grid(h)) f.push_back(p, std::sin(p.x) * std::cos(p.y));
        return f;
    };
    const auto r = seminorm_refinement_rate(gen, 0.5, {1.0 / 16, 1.0 / 32, 1.0 / 64});
    EXPECT_GE(r.rate, -0.1);
    EXPECT_LE(r.rate, 0.1);
    EXPECT_FALSE(r.zero_seminorm);
}

TEST(RefinementRate, HalfPlaneIndicatorRateNearAlpha) {
    auto gen = [](double h) {
        SampledField<double> f;
        f.spacing = h;
        for (const auto& p : Window{{-0.25, -0.25}, {0.25, 0.25}}.grid(h)) f.push_back(p, p.x > 0.0 ? 1.0 : 0.0);
        return f;
    };
    const auto r = seminorm_refinement_rate(gen, 0.5, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    EXPECT_GE(r.rate, 0.4);
    EXPECT_LE(r.rate, 0.6);
}

TEST(RefinementRate, ConstantFieldFlagsZeroSeminorm) {
    auto gen = [](double h) {
        SampledField<double> f;
        f.spacing = h;
        for (const auto& p : Window{}.grid(h)) f.push_back(p, 4.0);
        return f;
    };
    const auto r = seminorm_refinement_rate(gen, 0.5, {0.5, 0.25, 0.125});
    EXPECT_EQ(r.rate, 0.0);
    EXPECT_TRUE(r.zero_seminorm);
}

TEST(RefinementRate, RejectsBadSpacings) {
    EXPECT_THROW(fit_refinement_rate({0.1, 0.05}, {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(fit_refinement_rate({0.1, 0.2, 0.05}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <random>

#include "vortexlab/fields.hpp"

using namespace vortexlab;

namespace {

FieldOptions quadrature_route() {
    FieldOptions o;
    o.route = Route::quadrature;
    return o;
}

/// Brute-force u = K * omega over a disk of radius L around x (cell-centred polar grid).
template <class W>
Vec2 disk_convolution(W&& omega, const Vec2& x, double L, int nr, int nth) {
    Vec2 total{};
    const double dr = L / nr, dth = kTwoPi / nth;
    for (int i = 0; i < nr; ++i) {
        const double rho = (i + 0.5) * dr;
        for (int k = 0; k < nth; ++k) {
            const double th = (k + 0.5) * dth;
            const Vec2 e{std::cos(th), std::sin(th)};
            // K(x - y) with y = x + rho e is -e^perp / (2 pi rho); the area element cancels 1/rho.
            total -= e.perp() * (omega(x + e * rho) * dr * dth / kTwoPi);
        }
    }
    return total;
}

}  // namespace

TEST(Velocity, RadialExamples) {
    const auto m = VorticityModel::circular_patch(1.0);
    EXPECT_LT(distance(velocity(m, {0.5, 0.0}), Vec2{0.0, 0.25}), 1e-15);
    EXPECT_LT(distance(velocity(m, {2.0, 0.0}), Vec2{0.0, 0.25}), 1e-15);
    EXPECT_LT(distance(velocity(m, {0.5, 0.0}, quadrature_route()), Vec2{0.0, 0.25}), 1e-10);
    EXPECT_LT(distance(velocity(m, {2.0, 0.0}, quadrature_route()), Vec2{0.0, 0.25}), 1e-10);
}

TEST(Velocity, ZeroVorticity) {
    const auto z = VorticityModel::zero();
    EXPECT_EQ(velocity(z, {0.3, 0.4}).norm(), 0.0);
    EXPECT_EQ(grad_velocity(z, {0.3, 0.4}).value.norm(), 0.0);
    EXPECT_EQ(pv_symmetric_part(z, {0.3, 0.4}).norm(), 0.0);
}

TEST(Velocity, RadialQuadratureMatchesClosedFormAwayFromBoundary) {
    const auto annulus = VorticityModel::radial(RadialProfile::indicator(0.4, 1.0, 2.0), {0.2, -0.1});
    const auto smooth = VorticityModel::radial(
        RadialProfile::piecewise([](double r) { return std::cos(r) * (1.0 - r * r); }, {}, 1.0));
    for (const auto* m : {&annulus, &smooth}) {
        for (const Vec2& x : {Vec2{0.1, 0.1}, Vec2{0.7, -0.2}, Vec2{2.0, 1.0}, Vec2{-3.0, 0.5}}) {
            const Vec2 closed = velocity(*m, x);
            if (closed.norm() < 1e-12) continue;
            EXPECT_LT(distance(velocity(*m, x, quadrature_route()), closed) / closed.norm(), 1e-5);
        }
    }
}

TEST(Velocity, PatchContourFormulaMatchesAreaQuadrature) {
    const auto nodes = ellipse_nodes({0.1, 0.0}, 1.0, 0.6, 128);
    const auto m = VorticityModel::patch(nodes, 1.5);
    for (const Vec2& x : {Vec2{0.2, 0.1}, Vec2{1.5, 0.3}, Vec2{-0.4, -0.9}}) {
        const Vec2 contour = velocity(m, x);
        const Vec2 area = velocity(m, x, quadrature_route());
        EXPECT_LT(distance(contour, area), 1e-9) << x;
        const Vec2 brute = disk_convolution([&](const Vec2& y) { return vorticity(m, y); }, x, 3.0, 600, 720);
        EXPECT_LT(distance(contour, brute), 5e-3) << x;
    }
}

TEST(Velocity, CirclePolygonApproachesRadialSolution) {
    const auto disk = VorticityModel::circular_patch(1.0);
    for (std::size_t n : {128u, 512u}) {
        const auto poly = VorticityModel::patch(circle_nodes({}, 1.0, n));
        for (const Vec2& x : {Vec2{0.5, 0.0}, Vec2{0.0, 2.0}}) {
            EXPECT_LT(distance(velocity(poly, x), velocity(disk, x)), 10.0 / static_cast<double>(n * n));
        }
    }
}

TEST(Velocity, ShearClosedFormAndTruncatedQuadrature) {
    const auto profile = ShearProfile::sine(-1.0, 1.0, 1.0, 1);
    const auto m = VorticityModel::shear(profile);
    // Outside the strip the zero-mean normalisation gives u = 0.
    EXPECT_LT(velocity(m, {0.3, 1.5}).norm(), 1e-15);
    EXPECT_LT(velocity(m, {0.3, -4.0}).norm(), 1e-15);
    // Symmetric-disk truncation of the (conditionally convergent) convolution: error ~ 1/L.
    const double L = 60.0;
    for (double s : {-0.5, 0.25}) {
        const Vec2 x{0.0, s};
        const Vec2 closed = velocity(m, x);
        EXPECT_NEAR(closed.x, -profile.primitive(s), 1e-15);
        const Vec2 trunc = disk_convolution([&](const Vec2& y) { return profile(y.y); }, x, L, 24000, 2048);
        double moment = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double y2 = -1.0 + (i + 0.5) / 1000.0;
            moment += std::abs((s - y2) * profile(y2)) / 1000.0;
        }
        EXPECT_LT(distance(trunc, closed), 1.5 * moment / (kPi * L) + 1e-4) << s;
    }
}

TEST(GradVelocity, RadialInsideIsRotation) {
    const auto m = VorticityModel::circular_patch(1.0);
    for (const Vec2& x : {Vec2{0.0, 0.0}, Vec2{0.3, 0.4}, Vec2{-0.6, 0.1}}) {
        EXPECT_LT(distance(grad_velocity(m, x).value, kJ * 0.5), 1e-15);
    }
    EXPECT_LT(distance(grad_velocity(m, {0.3, 0.4}, quadrature_route()).value, kJ * 0.5), 1e-10);
}

TEST(GradVelocity, ShearClosedForm) {
    const auto profile = ShearProfile::sine(-1.0, 1.0, 2.0, 2);
    const auto m = VorticityModel::shear(profile);
    for (double s : {-0.9, -0.2, 0.0, 0.6}) {
        const Mat2 g = grad_velocity(m, {0.0, s}).value;
        EXPECT_LT(distance(g, Mat2{0.0, -profile(s), 0.0, 0.0}), 1e-15);
    }
}

TEST(GradVelocity, PatchMatchesRadialAndIsTraceless) {
    const auto poly = VorticityModel::patch(circle_nodes({}, 1.0, 512));
    const auto disk = VorticityModel::circular_patch(1.0);
    for (const Vec2& x : {Vec2{0.2, 0.3}, Vec2{1.6, -0.4}, Vec2{0.0, 0.9}}) {
        const Mat2 g = grad_velocity(poly, x).value;
        EXPECT_LT(distance(g, grad_velocity(disk, x).value), 1e-4);
        EXPECT_NEAR(g.trace(), 0.0, 1e-12);
        EXPECT_LT(distance(g, grad_velocity(poly, x, quadrature_route()).value), 1e-8);
    }
}

TEST(GradVelocity, FlagsBoundaryProximity) {
    const auto m = VorticityModel::circular_patch(1.0);
    EXPECT_TRUE(grad_velocity(m, {1.0 + 1e-8, 0.0}).near_boundary);
    EXPECT_FALSE(grad_velocity(m, {1.01, 0.0}).near_boundary);
}

TEST(PvSymmetricPart, RadialAtTwoMatchesClosedForm) {
    const auto m = VorticityModel::circular_patch(1.0);
    const Mat2 expected{0.0, -0.125, -0.125, 0.0};
    EXPECT_LT(distance(pv_symmetric_part(m, {2.0, 0.0}), expected), 1e-4);
    const auto ref = reference_solution(m, {2.0, 0.0});
    EXPECT_LT(distance(ref.gamma, expected), 1e-15);
}

TEST(PvSymmetricPart, GaussianSymmetricTracelessAndSplitsGradient) {
    const auto m = VorticityModel::gaussian(0.5);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 5; ++k) {
        const Vec2 x{u(rng), u(rng)};
        const Mat2 p = pv_symmetric_part(m, x);
        EXPECT_LT(std::abs(p.a12 - p.a21), 1e-10);
        EXPECT_LT(std::abs(p.trace()), 1e-10);
        const Mat2 g = grad_velocity(m, x).value;
        EXPECT_LT(distance(g, kJ * (0.5 * vorticity(m, x)) + p), 1e-6);
    }
}

TEST(GradVelocity, GaussianTraceCurlAndAntisymmetricPart) {
    const auto m = VorticityModel::gaussian(0.5, 1.3, {0.1, -0.2});
    for (const Vec2& x : {Vec2{0.0, 0.0}, Vec2{0.4, 0.3}, Vec2{-0.5, -0.6}}) {
        const Mat2 g = grad_velocity(m, x).value;
        const double w = vorticity(m, x);
        EXPECT_NEAR(g.trace(), 0.0, 1e-8);
        EXPECT_NEAR(g.antisym().a21, 0.5 * w, 1e-8);
        const double h = 1e-3;
        const double curl = (velocity(m, x + Vec2{h, 0}).y - velocity(m, x - Vec2{h, 0}).y -
                             velocity(m, x + Vec2{0, h}).x + velocity(m, x - Vec2{0, h}).x) / (2 * h);
        EXPECT_NEAR(curl, w, 1e-3 * std::abs(w));
    }
}

TEST(Velocity, DecaysLikeOneOverDistance) {
    const auto m = VorticityModel::gaussian(0.4, 2.0);
    const double circulation = 2.0 * kPi * 0.16;
    double worst = 0.0;
    for (double r = 2.0 * 6.5 * 0.4; r < 200.0; r *= 1.7) {
        const Vec2 x{r * std::cos(2.1), r * std::sin(2.1)};
        worst = std::max(worst, velocity(m, x).norm() * r);
    }
    EXPECT_LE(worst, circulation / kTwoPi * (1.0 + 1e-6));
    const auto patch = VorticityModel::circular_patch(1.0);
    for (double r : {2.0, 10.0, 100.0}) EXPECT_NEAR(velocity(patch, {0.0, r}).norm() * r, 0.5, 1e-12);
}

TEST(DirectionalIdentity, ShearWithConstantY) {
    const auto m = VorticityModel::shear(ShearProfile::sine(-1.0, 1.0, 1.0, 1));
    const auto e = directional_gradient_identity(m, YField::constant({1.0, 0.0}), {0.2, 0.3});
    EXPECT_LT(e.lhs.norm(), 1e-15);
    EXPECT_LT(e.rhs.norm(), 1e-8);
    EXPECT_LT(e.residual, 1e-8);
}

TEST(DirectionalIdentity, GaussianConstantAndRotationalY) {
    const auto m = VorticityModel::gaussian(0.5);
    for (const Vec2& x : {Vec2{0.1, 0.2}, Vec2{-0.4, 0.5}}) {
        const auto c = directional_gradient_identity(m, YField::constant({0.6, 0.8}), x);
        EXPECT_LT(c.residual, 1e-6);
        // Constant Y: the PV term reduces to (PV int grad K omega) Y.
        EXPECT_LT(distance(c.lhs, (grad_velocity(m, x).value) * Vec2{0.6, 0.8}), 1e-15);
        EXPECT_LT(directional_gradient_identity(m, YField::rotational({0.2, 0.0}), x).residual, 1e-6);
    }
}

TEST(DirectionalIdentity, ZeroVorticityAndPatchRejected) {
    const auto z = directional_gradient_identity(VorticityModel::zero(), YField::rotational(), {0.3, 0.1});
    EXPECT_EQ(z.lhs.norm(), 0.0);
    EXPECT_EQ(z.rhs.norm(), 0.0);
    EXPECT_THROW(directional_gradient_identity(VorticityModel::patch(circle_nodes({}, 1.0, 64)), YField::rotational(),
                                               {0.1, 0.1}),
                 ModelError);
}

TEST(ReferenceSolution, ShearAndRadial) {
    const auto shear = VorticityModel::shear(ShearProfile::sine(-1.0, 1.0, 1.0, 1));
    for (double s : {-0.7, 0.1, 0.9}) {
        const auto ref = reference_solution(shear, {1.0, s});
        EXPECT_EQ(ref.A.a12, -1.0);
        EXPECT_EQ(ref.A.a11 + ref.A.a21 + ref.A.a22, 0.0);
        EXPECT_EQ(ref.gamma.norm(), 0.0);
    }
    const auto annulus = VorticityModel::radial(RadialProfile::indicator(0.5, 1.0));
    const auto inner = reference_solution(annulus, {0.2, 0.1});
    EXPECT_EQ(inner.u.norm(), 0.0);
    EXPECT_EQ(inner.gamma.norm(), 0.0);
    EXPECT_THROW(reference_solution(VorticityModel::gaussian(0.5), {0.0, 0.0}), ModelError);
}

TEST(ReferenceSolution, RadialGammaContinuousAcrossBoundary) {
    const auto m = VorticityModel::circular_patch(1.0);
    const Vec2 dir{std::cos(0.7), std::sin(0.7)};
    const auto in = reference_solution(m, dir * (1.0 - 1e-9));
    const auto out = reference_solution(m, dir * (1.0 + 1e-9));
    EXPECT_GT(distance(in.grad_u, out.grad_u), 0.4);
    EXPECT_LT(distance(in.gamma, out.gamma), 1e-8);
}

TEST(Profiles, Validation) {
    EXPECT_THROW(RadialProfile::indicator(1.0, 0.5), ModelError);
    EXPECT_THROW(ShearProfile::general([](double) { return 1.0; }, 0.0, 1.0), ModelError);
    EXPECT_NO_THROW(ShearProfile::general([](double s) { return s - 0.5; }, 0.0, 1.0));
    const auto p = ShearProfile::general([](double s) { return s - 0.5; }, 0.0, 1.0);
    EXPECT_NEAR(p.primitive(1.0), 0.0, 1e-12);
    EXPECT_NEAR(p.primitive(0.5), -0.125, 1e-12);
    const auto g = RadialProfile::gaussian(0.5, 2.0, 3.25);
    EXPECT_NEAR(g.moment(10.0), 0.5 * 2.0 * 0.25, 1e-15);
}

TEST(VorticityModel, PatchOrientationAndKinds) {
    auto nodes = circle_nodes({}, 1.0, 64);
    std::reverse(nodes.begin(), nodes.end());
    const auto m = VorticityModel::patch(nodes, 2.0);
    EXPECT_TRUE(m.is_patch());
    EXPECT_EQ(m.kind_name(), "patch");
    EXPECT_GT(ClosedCurve(std::get<PatchModel>(m.kind()).boundary).signed_area(), 0.0);
    EXPECT_EQ(vorticity(m, {0.0, 0.0}), 2.0);
    EXPECT_EQ(vorticity(m, {2.0, 0.0}), 0.0);
    const Vec2 far{0.0, 3.0};
    EXPECT_LT(distance(velocity(m, far), velocity(VorticityModel::circular_patch(1.0, 2.0), far)), 1e-3);
}

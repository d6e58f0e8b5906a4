#include "conepath/convex_duality.hpp"
#include "conepath/kernels.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace conepath;

namespace {

// {x : x^T A x <= 1} with A = diag(1/a^2, 1/b^2).
StarBody ellipse(double a, double b, int m = 0) {
    return StarBody::closed_form(2, [=](const Vec& u) { return 1.0 / std::sqrt(u[0] * u[0] / (a * a) + u[1] * u[1] / (b * b)); }, m);
}

StarBody star(int m = 0) {
    return StarBody::closed_form(2, [](const Vec& u) { return 1.0 + 0.5 * std::cos(3.0 * std::atan2(u[1], u[0])); }, m);
}

}  // namespace

TEST(Directions, PlanarSetIsUniform) {
    const auto d = DirectionSet::standard(2, 8);
    EXPECT_EQ(d.size(), 8);
    EXPECT_NEAR(d[2][1], 1.0, 1e-15);
    EXPECT_NEAR(d.angular_spacing(), std::numbers::pi / 4, 1e-15);
    const auto s = DirectionSet::standard(3, 100);
    for (int i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i].norm(), 1.0, 1e-14);
}

TEST(Support, EllipseClosedForm) {
    const auto E = ellipse(2.0, 0.5);
    for (double th = 0.1; th < 6.2; th += 0.7) {
        const Vec w = oracle::unit(th);
        const double exact = std::sqrt(4.0 * w[0] * w[0] + 0.25 * w[1] * w[1]);
        EXPECT_NEAR(support_function(E, w), exact, 1e-10);
        EXPECT_NEAR(support_function(E, 3.0 * w), 3.0 * exact, 3e-10);
    }
}

TEST(Support, SampledBodyMatchesBruteForce) {
    const auto S = star();
    std::vector<Vec> pts;
    for (int i = 0; i < 20000; ++i) {
        const Vec u = oracle::unit(2.0 * std::numbers::pi * i / 20000);
        pts.push_back(S.radial(u) * u);
    }
    for (double th = 0.05; th < 6.2; th += 0.37)
        EXPECT_NEAR(support_function(S, oracle::unit(th)), oracle::support(pts, oracle::unit(th)), 1e-7);
}

TEST(Polar, DiskOfRadiusR) {
    const auto D = StarBody::closed_form(2, [](const Vec&) { return 2.0; });
    const auto P = polar(D);
    for (int i = 0; i < P.directions().size(); i += 37) EXPECT_NEAR(P.radii()[i], 0.5, 1e-12);
    EXPECT_TRUE(is_convex(P));
}

TEST(Polar, EllipseMatchesInverseForm) {
    const auto E = ellipse(2.0, 0.5, 512);
    const auto analytic = ellipse(0.5, 2.0, 512);
    EXPECT_LT(hausdorff_distance(polar(E), analytic), 1e-3);
}

TEST(Polar, BipolarIsIdentityOnConvexBodies) {
    const auto E = ellipse(1.5, 0.7, 512);
    EXPECT_LT(hausdorff_distance(polar(polar(E)), E), 5e-3);
}

TEST(Polar, StarAndItsHullHaveTheSamePolar) {
    const auto S = star(512);
    EXPECT_FALSE(is_convex(S));
    std::vector<Vec> pts;
    for (int i = 0; i < 4096; ++i) {
        const Vec u = oracle::unit(2.0 * std::numbers::pi * i / 4096);
        pts.push_back(S.radial(u) * u);
    }
    const auto hull = oracle::convex_hull(pts);
    const auto H = StarBody::closed_form(2, [&](const Vec& u) { return oracle::polygon_radial(hull, u); }, 512);
    EXPECT_TRUE(is_convex(H, 1e-6));
    EXPECT_LT(hausdorff_distance(polar(S), polar(H)), 5e-3);
}

TEST(Polar, SupportOfPolarIsGauge) {
    const auto E = ellipse(2.0, 0.5, 512);
    const auto P = polar(E);
    // h_{K°}(w) = gauge of K = |w| / r_K(w / |w|)
    for (double th = 0.2; th < 6.2; th += 0.9) {
        const Vec w = 1.7 * oracle::unit(th);
        EXPECT_NEAR(support_function(P, w), w.norm() / E.radial(w.normalized()), 1e-9);
    }
}

TEST(Convexity, MidpointTest) {
    EXPECT_TRUE(is_convex(ellipse(1.0, 0.2)));
    EXPECT_FALSE(is_convex(star()));
}

TEST(Hausdorff, ScaledDisk) {
    const auto D = StarBody::closed_form(2, [](const Vec&) { return 1.0; });
    EXPECT_NEAR(hausdorff_distance(D, D.scaled(1.25)), 0.25, 1e-12);
}

TEST(Lipschitz, LinearlyGrowingDisk) {
    const BodyField f = [](const Vec& x) {
        const double r = 1.0 + 0.3 * x[0];
        return StarBody::closed_form(2, [r](const Vec&) { return r; }, 64);
    };
    const Box box{vec2(0.0, 0.0), vec2(1.0, 1.0)};
    EXPECT_NEAR(lipschitz_estimate(f, box, 0.1), 0.3, 1e-9);
}

TEST(BodyCsv, RoundTrip) {
    const auto S = StarBody::from_samples(DirectionSet::standard(2, 64), std::vector<double>(64, 1.5));
    std::stringstream ss;
    write_body_csv(ss, S);
    EXPECT_EQ(ss.str().substr(0, 13), "u1,u2,radius\n");
    const auto R = read_body_csv(ss);
    ASSERT_EQ(R.radii().size(), 64u);
    EXPECT_DOUBLE_EQ(R.radii()[10], 1.5);
}

TEST(Kernels, ParallelMatchesSerialExactly) {
    const auto S = star(512);
    const auto E = ellipse(1.2, 0.8, 512);
    const auto dirs = DirectionSet::standard(2, 1023);
    EXPECT_EQ(kernels::support_batch(S, dirs), kernels::support_batch_serial(S, dirs));
    EXPECT_EQ(kernels::max_support_gap(S, E, dirs), kernels::max_support_gap_serial(S, E, dirs));
    const StarBody::RadialFn r = [](const Vec& u) { return 1.0 + u[0] * u[0]; };
    EXPECT_EQ(kernels::radial_batch(r, dirs), kernels::radial_batch_serial(r, dirs));
    std::vector<std::pair<int, int>> pairs;
    std::mt19937 rng(1);
    for (int k = 0; k < 300; ++k) pairs.emplace_back(rng() % 512, rng() % 512);
    EXPECT_EQ(kernels::max_midpoint_excess(S, pairs), kernels::max_midpoint_excess_serial(S, pairs));
}

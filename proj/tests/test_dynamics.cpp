#include "conepath/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace conepath;

namespace {

FinslerFamily wave() {
    return FinslerFamily::randers(
        2,
        [](double, const Vec& p) {
            Mat a = Mat::Identity(2, 2);
            a(0, 0) = 1.0 + 0.2 * std::sin(p[0]) * std::sin(p[0]);
            return a;
        },
        [](double t, const Vec& p) { return vec2(0.25 * std::sin(t + p[1]), 0.1 * std::cos(p[0])); });
}

FinslerFamily bumpy_riemannian() {
    return FinslerFamily::riemannian(2, [](double t, const Vec& p) {
        Mat a = Mat::Identity(2, 2);
        a(0, 0) = 1.0 + 0.3 * std::sin(p[1]) * std::sin(p[1]);
        a(1, 1) = 1.0 + 0.1 * std::cos(t);
        return a;
    });
}

}  // namespace

TEST(Cogeodesic, EuclideanFlowIsStraight) {
    const auto path = PositivePath::from_finsler(BaseManifold::euclidean(2), FinslerFamily::euclidean(2));
    const RayPoint r = RayPoint::unit(vec2(0.1, 0.2), vec2(3.0, 4.0));
    const Trajectory tr = integrate_cogeodesic(path.generator(), r, 0.0, 2.0, 1e-2);
    EXPECT_NEAR(tr.t.back(), 2.0, 1e-15);
    EXPECT_LT((tr.p.back() - vec2(0.1 + 1.2, 0.2 + 1.6)).norm(), 1e-13);
    EXPECT_LT((tr.v.back() - vec2(0.6, 0.8)).norm(), 1e-14);
}

TEST(Cogeodesic, StepIsShrunkToHitTheEndpoint) {
    const auto gen = Generator::dual_finsler(FinslerFamily::euclidean(2));
    const Trajectory tr = integrate_cogeodesic(gen, RayPoint::unit(zeros(2), vec2(1, 0)), 0.0, 1.0, 0.3);
    EXPECT_EQ(tr.size(), 5u);
    EXPECT_DOUBLE_EQ(tr.t.back(), 1.0);
}

TEST(Cogeodesic, StaticHamiltonianIsConserved) {
    const auto fam = bumpy_riemannian();
    const auto gen = Generator::dual_finsler(FinslerFamily::riemannian(2, [](double, const Vec& p) {
        Mat a = Mat::Identity(2, 2);
        a(0, 0) = 1.0 + 0.3 * std::sin(p[1]) * std::sin(p[1]);
        return a;
    }));
    const Trajectory tr = integrate_cogeodesic(gen, RayPoint::unit(vec2(0.3, 0.4), vec2(1, 1)), 0.0, 3.0, 1e-3);
    const double h0 = gen.value(0.0, tr.p.front(), tr.lifted(0));
    for (std::size_t i = 0; i < tr.size(); i += 300) EXPECT_NEAR(gen.value(tr.t[i], tr.p[i], tr.lifted(i)), h0, 1e-10);
}

TEST(Cogeodesic, BlowUpRaisesWithLastGoodState) {
    const auto gen = Generator::hamiltonian(2, [](double t, const Vec&, const Vec& v) { return v.norm() / (1.0 - t); });
    try {
        integrate_cogeodesic(gen, RayPoint::unit(zeros(2), vec2(1, 0)), 0.0, 2.0, 0.25);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_LT(e.t(), 1.0 + 1e-12);
        EXPECT_TRUE(e.p().allFinite());
    }
}

TEST(Generator, FiniteDifferenceFallbackMatchesClosedForm) {
    const auto fam = wave();
    const auto exact = Generator::dual_finsler(fam);
    const auto fd = Generator::hamiltonian(2, [fam](double t, const Vec& p, const Vec& v) { return fam.at(t, p).dual(v); });
    const Vec p = vec2(0.4, 1.9), v = vec2(-0.3, 0.8);
    EXPECT_LT((exact.grad_v(0.2, p, v) - fd.grad_v(0.2, p, v)).norm(), 1e-9);
    EXPECT_LT((exact.grad_p(0.2, p, v) - fd.grad_p(0.2, p, v)).norm(), 1e-9);
}

TEST(Generator, ReversalIsTimeReflection) {
    const auto g = Generator::dual_finsler(wave());
    const auto r = g.reversed();
    const Vec p = vec2(1.0, 2.0), v = vec2(0.5, 0.5);
    EXPECT_DOUBLE_EQ(r.value(0.3, p, v), -g.value(-0.3, p, v));
    EXPECT_TRUE(r.is_reversed());
    EXPECT_EQ(r.finsler(), nullptr);
    EXPECT_NE(g.finsler(), nullptr);
}

TEST(PathApply, InverseUndoesForward) {
    const auto path = PositivePath::from_finsler(BaseManifold::torus(2, 2.0 * M_PI), wave());
    const RayPoint r = RayPoint::unit(vec2(0.5, 0.5), vec2(0.2, -1.0));
    const RayPoint f = path_apply(path, 0.8, r);
    const RayPoint back = inverse_path_apply(path, 0.8, f);
    EXPECT_LT(ray_distance(path.base(), back, r), 1e-10);
}

TEST(PathApply, ReversedPathRunsBackwards) {
    const auto path = PositivePath::from_finsler(BaseManifold::euclidean(2), wave());
    const RayPoint r = RayPoint::unit(vec2(0.5, 0.5), vec2(0.2, -1.0));
    // phi^rev_t = phi_{-t}
    const RayPoint a = path_apply(path.reversed(), 0.5, r);
    const RayPoint b = path_apply(path, -0.5, r);
    EXPECT_LT(ray_distance(path.base(), a, b), 1e-10);
}

TEST(PathApply, BeyondHorizonIsRejected) {
    const auto path = PositivePath::from_finsler(BaseManifold::euclidean(2), wave(), {1e-3, 1.0});
    EXPECT_THROW(path_apply(path, 2.0, RayPoint::unit(zeros(2), vec2(1, 0))), DomainError);
}

TEST(PathApply, BatchMatchesSerialExactly) {
    const auto path = PositivePath::from_finsler(BaseManifold::torus(2, 2.0 * M_PI), wave(), {1e-2, 10.0});
    std::vector<RayPoint> rays;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> G;
    for (int i = 0; i < 16; ++i) rays.push_back(RayPoint::unit(vec2(G(rng), G(rng)), vec2(G(rng), G(rng))));
    const auto a = path_apply_batch(path, 0.7, rays);
    const auto b = path_apply_batch_serial(path, 0.7, rays);
    for (std::size_t i = 0; i < rays.size(); ++i) {
        EXPECT_EQ(a[i].p, b[i].p);
        EXPECT_EQ(a[i].v, b[i].v);
    }
}

TEST(PathApply, ScalingEquivariance) {
    const auto path = PositivePath::from_finsler(BaseManifold::torus(2, 2.0 * M_PI), wave());
    const RayPoint r{vec2(1.0, 3.0), vec2(0.6, 0.8), Normalization::free, 0.0};
    const RayPoint a = path_apply(path, 1.0, r);
    for (double lambda : {0.1, 10.0}) {
        const RayPoint s{r.p, lambda * r.v, Normalization::free, 0.0};
        const RayPoint b = path_apply(path, 1.0, s);
        EXPECT_LT(ray_distance(path.base(), a, b), 1e-8);
        EXPECT_NEAR(b.v.norm() / a.v.norm(), lambda, 1e-9 * lambda);
    }
}

TEST(Geodesics, LagrangianAgreesWithConeRoute) {
    const auto fam = bumpy_riemannian();
    const auto path = PositivePath::from_finsler(BaseManifold::euclidean(2), fam);
    const RayPoint r = RayPoint::unit(vec2(0.2, 0.3), vec2(0.6, -0.8));
    const SpacetimeTrajectory cone = cone_geodesic(path, r, 0.0, 1.0);
    const SpacetimeTrajectory lag =
        lagrangian_geodesic(fam, {0.0, BasePoint(r.p)}, {1.0, TangentVector{cone.w.front()}}, 1.0, 1e-3);
    ASSERT_EQ(cone.size(), lag.size());
    double dev = 0.0, curvature = 0.0;
    for (std::size_t i = 0; i < lag.size(); ++i) {
        dev = std::max(dev, (cone.p[i] - lag.p[i]).norm());
        curvature = std::max(curvature, (cone.w[i] - cone.w.front()).norm());
        EXPECT_LT(std::abs(cone.null_residual[i]), 1e-9);
    }
    EXPECT_LT(dev, 1e-6);
    EXPECT_GT(curvature, 1e-3);  // the comparison is not between two straight lines
}

TEST(Geodesics, LagrangianRejectsNonNullStart) {
    EXPECT_THROW(lagrangian_geodesic(FinslerFamily::euclidean(2), {0.0, BasePoint(zeros(2))},
                                     {2.0, TangentVector{vec2(1.0, 0.0)}}, 1.0),
                 DomainError);
}

TEST(TrajectoryCsv, HeaderAndResidual) {
    const auto gen = Generator::dual_finsler(FinslerFamily::euclidean(2));
    const Trajectory tr = integrate_cogeodesic(gen, RayPoint::unit(zeros(2), vec2(1, 0)), 0.0, 0.1, 0.05);
    std::ostringstream out;
    write_trajectory_csv(out, gen, tr);
    const std::string s = out.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "t,p1,p2,v1,v2,H_residual");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
    EXPECT_EQ(s.find('\r'), std::string::npos);
}

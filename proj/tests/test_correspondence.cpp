#include "conepath/correspondence.hpp"
#include "oracles.hpp"

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

}  // namespace

TEST(Correspondence, FinslerRecoveredFromConeSlices) {
    const ConeStructure cone(BaseManifold::torus(2, 2.0 * M_PI), wave());
    const FinslerFamily F = finsler_from_cone_slices(cone);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> G;
    for (int k = 0; k < 20; ++k) {
        const double t = G(rng);
        const Vec p = vec2(G(rng), G(rng)), w = vec2(G(rng), G(rng));
        const double exact = cone.finsler().at(t, p).norm(w);
        EXPECT_NEAR(F.at(t, p).norm(w), exact, 1e-12 * exact);
    }
}

TEST(Correspondence, ConeFromPathContainsTheSlices) {
    const auto path = path_from_cone(ConeStructure(BaseManifold::euclidean(2), FinslerFamily::euclidean(2)));
    const auto space = cone_from_path(path);
    ASSERT_TRUE(space.has_coballs());
    EXPECT_NEAR(space.G(0.0, zeros(2), {1.0, TangentVector{vec2(0.6, 0.8)}}), 0.0, 1e-12);
    EXPECT_TRUE(space.contains(0.0, zeros(2), {2.0, TangentVector{vec2(1.0, 1.0)}}));
}

TEST(Correspondence, NonPositivePathIsRejected) {
    const auto path = PositivePath::from_finsler(BaseManifold::euclidean(2), FinslerFamily::euclidean(2));
    try {
        cone_from_path(path.reversed());
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("path not positive"), std::string::npos);
    }
}

TEST(Correspondence, RoundtripOnRandersWave) {
    const ConeStructure cone(BaseManifold::torus(2, 2.0 * M_PI), wave());
    RoundtripGrid grid;
    grid.times = 2;
    grid.points = 3;
    grid.g_samples = 8;
    const auto rep = roundtrip_check(cone, grid);
    EXPECT_EQ(rep.cells.size(), 6u);
    EXPECT_LT(rep.max_hausdorff, 1e-6);
    EXPECT_LT(rep.max_g_error, 1e-6);
    EXPECT_TRUE(rep.pass());
    std::ostringstream out;
    write_roundtrip_csv(out, rep);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "t,p1,p2,hausdorff,g_error");
    EXPECT_EQ(rep.to_json()["cells"].size(), 6u);
}

TEST(Correspondence, RecoveredGMatchesDtMinusF) {
    const ConeStructure cone(BaseManifold::torus(2, 2.0 * M_PI), wave());
    const auto space = cone_from_path(path_from_cone(cone));
    std::mt19937_64 rng(4);
    std::normal_distribution<double> G;
    for (int k = 0; k < 10; ++k) {
        const double t = 0.1 * k;
        const Vec p = vec2(G(rng), G(rng)), w = vec2(G(rng), G(rng));
        const double w0 = 2.0 * G(rng);
        const double expected = w0 - cone.finsler().at(t, p).norm(w);
        EXPECT_NEAR(space.G(t, p, {w0, TangentVector{w}}), expected, 1e-6);
    }
}

TEST(Probe, FlatRaysCrossOnce) {
    const auto path = path_from_cone(ConeStructure(BaseManifold::torus(2, 1.0), FinslerFamily::euclidean(2)));
    const auto space = cone_from_path(path);
    std::vector<RayPoint> rays;
    for (int i = 0; i < 8; ++i) rays.push_back(RayPoint::unit(vec2(0.1 * i, 0.5), oracle::unit(0.8 * i)));
    const auto rep = cauchy_crossing_probe(path, space, rays, 2.0);
    EXPECT_EQ(rep.single_crossing, 8);
    EXPECT_EQ(rep.blow_ups, 0);
    EXPECT_DOUBLE_EQ(rep.single_crossing_fraction(), 1.0);
    EXPECT_TRUE(rep.to_json()["experimental"].get<bool>());
}

TEST(Gauge, ConeOfNonConvexPathIsConvex) {
    // H = |v| / r(theta) with a three-petal star: K = {H <= 1} is not convex,
    // but C_f only sees its hull, so the recovered F = h_K is a genuine norm.
    auto H = [](double, const Vec&, const Vec& v) {
        return v.norm() / (1.0 + 0.5 * std::cos(3.0 * std::atan2(v[1], v[0])));
    };
    const auto path = PositivePath::from_hamiltonian(BaseManifold::torus(2, 2.0 * M_PI),
                                                     Generator::hamiltonian(2, H).with_invariant(true));
    const auto space = cone_from_path(path);
    EXPECT_FALSE(is_convex(space.coball(0.0, zeros(2))));
    EXPECT_TRUE(is_convex(space.slice(0.0, zeros(2)), 1e-6));
    const FinslerFamily F = finsler_from_cone_slices(space);
    const auto N = F.at(0.0, zeros(2));
    // Along a petal tip the hull touches the star: h_K(e1) = r(0) = 1.5.
    EXPECT_NEAR(N.norm(vec2(1.0, 0.0)), 1.5, 1e-6);
    EXPECT_NEAR(N.norm(vec2(2.0, 0.0)), 3.0, 2e-6);
}

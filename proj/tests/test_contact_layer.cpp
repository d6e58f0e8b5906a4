#include "conepath/contact_layer.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace conepath;

namespace {

PositivePath wave_path() {
    return PositivePath::from_finsler(
        BaseManifold::torus(2, 2.0 * M_PI),
        FinslerFamily::randers(
            2,
            [](double, const Vec& p) {
                Mat a = Mat::Identity(2, 2);
                a(0, 0) = 1.0 + 0.2 * std::sin(p[0]) * std::sin(p[0]);
                return a;
            },
            [](double t, const Vec& p) { return vec2(0.25 * std::sin(t + p[1]), 0.1 * std::cos(p[0])); }));
}

PositivePath flat_path() { return PositivePath::from_finsler(BaseManifold::euclidean(2), FinslerFamily::euclidean(2)); }

}  // namespace

TEST(Contact, LiouvillePairingIgnoresFibreComponents) {
    Vec u(4);
    u << 1.0, 2.0, 100.0, -100.0;
    EXPECT_DOUBLE_EQ(liouville_pairing(vec2(3.0, 0.5), u), 4.0);
    EXPECT_THROW(liouville_pairing(vec2(1, 0), vec2(1, 0)), DomainError);
}

TEST(Contact, SampleLiesOnCoSphereWithOrthonormalFrame) {
    const auto path = wave_path();
    const auto s = make_contact_sample(path.generator(), 0.4, vec2(1.0, 2.0), vec2(3.0, -1.0));
    EXPECT_NEAR(path.generator().value(0.4, s.ray.p, s.ray.v), 1.0, 1e-14);
    ASSERT_EQ(s.basis.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.basis[i].dot(s.basis[j]), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Contact, FormEvaluationRequiresUnitRepresentative) {
    const auto path = flat_path();
    auto s = make_contact_sample(path.generator(), 0.0, zeros(2), vec2(1.0, 0.0));
    Vec u(4);
    u << 1.0, 0.0, 0.0, 0.0;
    EXPECT_DOUBLE_EQ(contact_form_eval(path.generator(), s, u), 1.0);
    s.ray.v *= 2.0;
    EXPECT_THROW(contact_form_eval(path.generator(), s, u), DomainError);
}

TEST(Contact, DalphaIsTheCanonicalSymplecticForm) {
    const auto s = make_contact_sample(flat_path().generator(), 0.0, zeros(2), vec2(0.0, 1.0));
    Vec X(4), Y(4);
    X << 1.0, 2.0, 0.5, -1.0;
    Y << -0.3, 0.7, 2.0, 1.5;
    // d lambda(X, Y) = X_v . Y_p - Y_v . X_p
    const double expected = X.tail(2).dot(Y.head(2)) - Y.tail(2).dot(X.head(2));
    EXPECT_NEAR(dalpha(s, X, Y), expected, 1e-10);
    EXPECT_NEAR(dalpha(s, X, X), 0.0, 1e-14);
}

TEST(Contact, PathFieldIsTheReebField) {
    const auto path = wave_path();
    for (int k = 0; k < 4; ++k) {
        const auto s = make_contact_sample(path.generator(), 0.25 * k, vec2(0.7 * k, 1.0), vec2(std::cos(k), std::sin(k)));
        const ReebReport r = verify_reeb_conditions(path, s);
        EXPECT_NEAR(r.alpha_of_X, 1.0, 1e-7);
        EXPECT_LT(r.max_dalpha_contraction, 1e-6);
        EXPECT_GT(contact_volume(s), 0.0);
    }
}

TEST(Contact, NonReebFieldIsDetected) {
    const auto s = make_contact_sample(flat_path().generator(), 0.0, zeros(2), vec2(1.0, 0.0));
    Vec X(4);
    X << 1.0, 0.0, 0.0, 0.3;  // alpha(X) = 1 but X has a fibre component
    const ReebReport r = verify_reeb_conditions(s, X);
    EXPECT_NEAR(r.alpha_of_X, 1.0, 1e-14);
    EXPECT_GT(r.max_dalpha_contraction, 0.1);
}

TEST(Positivity, SignOfMarginFollowsThePath) {
    const auto path = wave_path();
    const RayPoint r{vec2(0.3, 0.7), vec2(0.6, -0.8), Normalization::unit_dual_finsler, 0.0};
    EXPECT_NEAR(positivity_margin(path, 0.5, r), 1.0, 1e-6);
    EXPECT_NEAR(positivity_margin(path.reversed(), 0.5, r), -1.0, 1e-6);
    const RayPoint e{vec2(0.3, 0.7), vec2(0.6, -0.8), Normalization::unit_euclidean, 0.0};
    EXPECT_GT(positivity_margin(path, 0.5, e), 0.0);
}

TEST(Skies, TimelikeCurveIsNegativelyOneSigned) {
    const auto path = flat_path();
    const SpacetimeCurve curve = [](double s) { return CurvePoint{s, vec2(0.3 * s, 0.0)}; };
    const auto iso = sky_isotopy_positivity(path, curve, {0.0, 0.5, 1.0}, 32);
    EXPECT_EQ(iso.verdict, "timelike-consistent");
    // u . p' / H - t' with |p'| = 0.3 lies in [-1.3, -0.7].
    EXPECT_NEAR(iso.max_margin, -0.7, 1e-6);
    EXPECT_NEAR(iso.min_margin, -1.3, 1e-6);
    std::ostringstream out;
    write_margins_csv(out, iso);
    EXPECT_EQ(out.str().substr(0, 14), "s,ray,margin\n0");
}

TEST(Skies, ConeGeodesicTouchesItsTangentRay) {
    const auto path = wave_path();
    const RayPoint start = RayPoint::unit(vec2(1.0, 1.0), vec2(0.3, 1.0));
    const SpacetimeCurve geo = [&](double s) { return CurvePoint{s, path_apply(path, s, start).p}; };
    for (double s : {0.2, 0.6}) {
        const RayPoint here = path_apply(path, s, start);
        EXPECT_LT(std::abs(isotopy_margin(path, geo, s, here.v)), 1e-6);
    }
}

TEST(Skies, SpacelikeCurveIsNotCausal) {
    const auto path = flat_path();
    const SpacetimeCurve curve = [](double s) { return CurvePoint{0.1 * s, vec2(s, 0.0)}; };
    EXPECT_EQ(sky_isotopy_positivity(path, curve, {0.0, 0.5}, 16).verdict, "not causal");
}

TEST(Skies, SkyIsALegendrianCircle) {
    const auto path = flat_path();
    const auto sky_rays = sky(path, {1.0, BasePoint(zeros(2))}, 16);
    ASSERT_EQ(sky_rays.size(), 16u);
    // Flat sky: covector u at base point -u/|u| after flowing back one unit of time.
    for (const auto& r : sky_rays) EXPECT_NEAR((r.p + r.v / r.v.norm()).norm(), 0.0, 1e-12);
}

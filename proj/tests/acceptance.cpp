// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "conepath/correspondence.hpp"
#include "conepath/runner.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace conepath;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

Scenario load(const std::string& name) {
    return parse_scenario_file(std::string(CONEPATH_SCENARIO_DIR) + "/" + name + ".scenario");
}

const std::vector<std::string> kShipped = {"minkowski", "randers_wave", "riemannian_static", "star_gauge"};

fs::path scratch(const std::string& leaf) { return fs::temp_directory_path() / "conepath_acceptance" / leaf; }

struct Outcome {
    RunResult result;
    std::string log;
    double seconds = 0.0;

    const CheckResult* find(const std::string& task, const std::string& name) const {
        for (const auto& c : result.checks)
            if (c.task == task && c.name == name) return &c;
        return nullptr;
    }
    double value(const std::string& task, const std::string& name) const {
        const CheckResult* c = find(task, name);
        return c ? c->value : std::numeric_limits<double>::quiet_NaN();
    }
    bool no_errors(const std::string& task) const {
        return !find(task, "error") && !find(task, "integration");
    }
};

Outcome run(Scenario s, const std::vector<std::string>& tasks, const std::string& leaf) {
    if (!tasks.empty()) s.tasks = tasks;
    std::ostringstream log;
    const auto t0 = Clock::now();
    RunOptions opts;
    opts.out_dir = scratch(leaf).string();
    Outcome o{run_scenario(s, opts, log), log.str(), 0.0};
    o.seconds = seconds_since(t0);
    return o;
}

// 1 -----------------------------------------------------------------------
void flat_baseline() {
    const Outcome o = run(load("minkowski"), {}, "minkowski");
    const double straight = o.value("geodesics", "straight_line_error");
    const double h = o.value("roundtrip", "max_slice_hausdorff");
    const double g = o.value("roundtrip", "max_g_error");
    const bool pass = o.result.pass() && o.result.artifacts.size() == 6 && straight <= 1e-6 && h <= 1e-9 &&
                      g <= 1e-9 && o.seconds <= 10.0;
    report(1, pass,
           "minkowski straight-line error " + fmt(straight) + ", slice Hausdorff " + fmt(h) + ", G error " + fmt(g) +
               ", " + std::to_string(o.result.artifacts.size()) + " artifacts, " + fmt(o.seconds) + " s");
}

// 2 -----------------------------------------------------------------------
void dual_norm_oracle() {
    const auto randers = FinslerFamily::randers(
        2, [](double, const Vec&) { return Mat(Mat::Identity(2, 2)); }, [](double, const Vec&) { return vec2(0.5, 0.0); });
    const auto riem = FinslerFamily::riemannian(2, [](double, const Vec&) {
        Mat a = Mat::Zero(2, 2);
        a(0, 0) = 4.0;
        a(1, 1) = 1.0;
        return a;
    });
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> G;
    double worst = 0.0;
    for (const FinslerFamily* fam : {&randers, &riem}) {
        const LocalNorm N = fam->at(0.0, zeros(2));
        for (int k = 0; k < 100; ++k) {
            const Vec v = vec2(G(rng), G(rng));
            const double lib = dual_norm(*fam, 0.0, BasePoint(zeros(2)), {v});
            const double ref = oracle::dual_norm_2d([&](const Vec& u) { return N.norm(u); }, v, 4096);
            worst = std::max(worst, std::abs(lib - ref) / ref);
        }
    }
    report(2, worst <= 1e-6, "max relative dual-norm error vs 4096-sample brute force " + fmt(worst));
}

// 3 -----------------------------------------------------------------------
void reeb_check() {
    const Scenario s = load("randers_wave");
    const auto path = PositivePath::from_finsler(s.manifold(), s.finsler(), s.integrator);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
    double alpha = 0.0, contraction = 0.0;
    for (int i = 0; i < 20; ++i) {
        const RayPoint r = RayPoint::unit(vec2(U(rng), U(rng)), oracle::unit(U(rng)));
        const Trajectory tr = integrate_cogeodesic(path.generator(), r, 0.0, 1.0, s.integrator.step);
        for (std::size_t k = 0; k < tr.size(); k += 200) {
            const auto sample = make_contact_sample(path.generator(), tr.t[k], tr.p[k], tr.lifted(k));
            const ReebReport rr = verify_reeb_conditions(path, sample);
            alpha = std::max(alpha, std::abs(rr.alpha_of_X - 1.0));
            contraction = std::max(contraction, rr.max_dalpha_contraction);
        }
    }
    report(3, alpha <= 1e-5 && contraction <= 1e-4,
           "20 randers_wave trajectories: max |alpha(X) - 1| " + fmt(alpha) + ", max |d alpha(X, .)| " + fmt(contraction));
}

// 4 -----------------------------------------------------------------------
void roundtrip_refinement() {
    const Scenario s = load("randers_wave");
    const ConeStructure cone(s.manifold(), s.finsler());
    const auto t0 = Clock::now();
    RoundtripGrid coarse;
    const RoundtripReport a = roundtrip_check(cone, coarse, {1e-3, 10.0});
    RoundtripGrid fine = coarse;
    fine.directions = 4 * DirectionSet::default_count(2);
    const RoundtripReport b = roundtrip_check(cone, fine, {2.5e-4, 10.0});
    const double secs = seconds_since(t0);
    const double rh = a.max_hausdorff / b.max_hausdorff, rg = a.max_g_error / b.max_g_error;
    const bool pass = a.max_hausdorff <= 1e-3 && a.max_g_error <= 1e-3 && rh >= 4.0 && rg >= 4.0 && secs <= 300.0;
    report(4, pass,
           "randers_wave roundtrip Hausdorff " + fmt(a.max_hausdorff) + " -> " + fmt(b.max_hausdorff) + " (x" + fmt(rh) +
               "), G " + fmt(a.max_g_error) + " -> " + fmt(b.max_g_error) + " (x" + fmt(rg) + "), " + fmt(secs) + " s");
}

// 5 -----------------------------------------------------------------------
void cross_method() {
    double worst = 0.0;
    bool ok = true;
    std::string detail;
    for (const auto& name : kShipped) {
        Scenario s = load(name);
        s.rays = 20;
        const Outcome o = run(s, {"geodesics"}, name + "_geo");
        const double d = o.value("geodesics", "cross_method_sup_distance");
        ok = ok && o.no_errors("geodesics") && d <= 1e-4;
        worst = std::max(worst, d);
        detail += name + " " + fmt(d) + "; ";
    }
    report(5, ok, "Lagrangian vs contact-flow sup distance over 20 rays: " + detail + "max " + fmt(worst));
}

// 6 -----------------------------------------------------------------------
void positivity_suite() {
    bool ok = true;
    double min_fwd = 1e300, max_bwd = -1e300, min_timelike = 1e300, max_tangent = 0.0;
    for (const auto& name : kShipped) {
        const Outcome o = run(load(name), {"positivity", "skies"}, name + "_pos");
        ok = ok && o.no_errors("positivity") && o.no_errors("skies");
        const double f = o.value("positivity", "min_margin"), b = o.value("positivity", "reversed_max_margin");
        const double tl = o.value("skies", "timelike_curve_min_abs_margin");
        const double tg = o.value("skies", "geodesic_tangent_ray_margin");
        const CheckResult* verdict = o.find("skies", "timelike_curve_verdict");
        ok = ok && f > 0.0 && b < 0.0 && tl >= 0.1 && tg <= 1e-5 && verdict && verdict->pass;
        min_fwd = std::min(min_fwd, f);
        max_bwd = std::max(max_bwd, b);
        min_timelike = std::min(min_timelike, tl);
        max_tangent = std::max(max_tangent, tg);
    }
    report(6, ok,
           "min margin " + fmt(min_fwd) + ", reversed max " + fmt(max_bwd) + ", timelike |margin| >= " +
               fmt(min_timelike) + " (one-signed), tangent-ray margin " + fmt(max_tangent));
}

// 7 -----------------------------------------------------------------------
void convex_duality_suite() {
    auto ellipse = [](double a, double b) {
        return StarBody::closed_form(2, [=](const Vec& u) { return 1.0 / std::sqrt(u[0] * u[0] / (a * a) + u[1] * u[1] / (b * b)); }, 512);
    };
    const StarBody randers_ball = StarBody::closed_form(
        2, [](const Vec& u) { return 1.0 / (u.norm() + 0.5 * u[0]); }, 512);
    const double bipolar = std::max(hausdorff_distance(polar(polar(ellipse(2.0, 0.5))), ellipse(2.0, 0.5)),
                                    hausdorff_distance(polar(polar(randers_ball)), randers_ball));

    const StarBody star =
        StarBody::closed_form(2, [](const Vec& u) { return 1.0 + 0.5 * std::cos(3.0 * std::atan2(u[1], u[0])); }, 512);
    std::vector<Vec> pts;
    for (int i = 0; i < 8192; ++i) {
        const Vec u = oracle::unit(2.0 * M_PI * i / 8192);
        pts.push_back(star.radial(u) * u);
    }
    const auto hull_poly = oracle::convex_hull(pts);
    const StarBody hull = StarBody::closed_form(2, [&](const Vec& u) { return oracle::polygon_radial(hull_poly, u); }, 512);
    const double star_gap = hausdorff_distance(polar(star), polar(hull));

    const double ellipse_gap = hausdorff_distance(polar(ellipse(2.0, 0.5)), ellipse(0.5, 2.0));
    report(7, bipolar <= 5e-3 && star_gap <= 5e-3 && ellipse_gap <= 1e-3,
           "bipolar " + fmt(bipolar) + ", star vs hull polar " + fmt(star_gap) + ", ellipse polar vs inverse form " +
               fmt(ellipse_gap));
}

// 8 -----------------------------------------------------------------------
void lorentz_finsler_check() {
    const Scenario s = load("randers_wave");
    const auto path = PositivePath::from_finsler(s.manifold(), s.finsler(), s.integrator);
    const auto space = cone_from_path(path);
    LorentzFinslerRegion reg;
    reg.p_lo = zeros(2);
    reg.p_hi = Vec::Ones(2);
    const auto rep = check_lorentz_finsler_space(space, reg);
    const double big = std::max(rep.lipschitz, rep.lipschitz_half_step);
    const double rel = std::abs(rep.lipschitz - rep.lipschitz_half_step) / big;
    const bool pass = rep.max_homogeneity_violation <= 1e-6 && rep.max_concavity_violation <= 1e-6 &&
                      rep.lipschitz_finite && rel <= 0.1;
    report(8, pass,
           "randers_wave C_f homogeneity " + fmt(rep.max_homogeneity_violation) + ", concavity " +
               fmt(rep.max_concavity_violation) + ", Lipschitz " + fmt(rep.lipschitz) + " / " +
               fmt(rep.lipschitz_half_step) + " (rel change " + fmt(rel) + ")");
}

// 9 -----------------------------------------------------------------------
void scaling_equivariance() {
    const Scenario s = load("randers_wave");
    const auto path = PositivePath::from_finsler(s.manifold(), s.finsler(), s.integrator);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const RayPoint r{vec2(U(rng), U(rng)), oracle::unit(U(rng)), Normalization::free, 0.0};
        for (double t : {0.5, 1.0, -0.7}) {
            const RayPoint a = path_apply(path, t, r);
            for (double lambda : {0.1, 10.0}) {
                const RayPoint b = path_apply(path, t, {r.p, lambda * r.v, Normalization::free, 0.0});
                worst = std::max(worst, ray_distance(path.base(), a, b));
            }
        }
    }
    report(9, worst <= 1e-8, "max ray deviation under covector scaling by 0.1 and 10: " + fmt(worst));
}

// 10 ----------------------------------------------------------------------
void probe() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kShipped) {
        Scenario s = load(name);
        s.probe_rays = 200;
        s.probe_horizon = 5.0;
        const Outcome o = run(s, {"probe"}, name + "_probe");
        const CheckResult* c = o.find("probe", "single_crossing_fraction");
        const bool written = fs::exists(scratch(name + "_probe") / "probe.json");
        if (name == "star_gauge") {
            ok = ok && c && !c->asserted && written;
            detail += name + " recorded " + (c ? fmt(c->value) : "none") + "; ";
        } else {
            ok = ok && c && c->value == 1.0 && written;
            detail += name + " " + (c ? fmt(c->value) : "none") + "; ";
        }
    }
    report(10, ok, "single-crossing fraction over T = 5, 200 rays: " + detail);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    const std::pair<int, void (*)()> criteria[] = {
        {1, flat_baseline},          {2, dual_norm_oracle},      {3, reeb_check}, {4, roundtrip_refinement},
        {5, cross_method},           {6, positivity_suite},      {7, convex_duality_suite},
        {8, lorentz_finsler_check},  {9, scaling_equivariance},  {10, probe},
    };
    for (const auto& [id, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, false, std::string("exception: ") + e.what());
        }
    }
    fs::remove_all(fs::temp_directory_path() / "conepath_acceptance");
    std::printf("%d of 10 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}

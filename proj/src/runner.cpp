#include "conepath/runner.hpp"

#include "conepath/correspondence.hpp"
#include "conepath/detail/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace conepath {

namespace fs = std::filesystem;

bool RunResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.asserted || c.pass; });
}

std::string default_output_root() {
    if (const char* env = std::getenv("CONEPATH_OUT"); env && *env) return env;
    return "conepath_out";
}

namespace {

std::string num(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

const char* axis_name(int i) {
    static const char* names[] = {"x", "y", "z"};
    return names[i];
}

// Everything the tasks share, built once per run.
struct Model {
    Scenario sc;
    BaseManifold base;
    bool invariant = false;
    // Convex kinds: the scenario's metric. Gauge kind: F_f recovered from C_f.
    std::optional<FinslerFamily> fam;
    std::optional<PositivePath> path;      // cone-induced path, or the gauge path f
    std::optional<PositivePath> geo_path;  // path generated by fam (equals `path` for convex kinds)
    std::optional<LorentzFinslerSpace> space;

    const LorentzFinslerSpace& cone_f() {
        if (!space) space = cone_from_path(*path, {sc.directions, 16});
        return *space;
    }
};

bool coefficients_invariant(const Scenario& s) {
    for (const auto& [k, e] : s.coefficients)
        if (e.uses("t") || e.uses("x") || e.uses("y") || e.uses("z")) return false;
    return true;
}

Model build_model(const Scenario& sc) {
    Model m{sc, sc.manifold(), false, {}, {}, {}, {}};
    m.invariant = coefficients_invariant(sc);
    if (sc.kind == "gauge") {
        m.path = PositivePath::from_hamiltonian(m.base, sc.gauge_generator(), sc.integrator);
        // Geodesics are compared on C_f, whose Finsler data is the gauge of its slices.
        m.fam = finsler_from_cone_slices(m.cone_f());
        m.geo_path = PositivePath::from_hamiltonian(
            m.base, Generator::dual_finsler(*m.fam).with_invariant(m.invariant), sc.integrator);
    } else {
        m.fam = sc.finsler();
        m.path = PositivePath::from_hamiltonian(m.base, Generator::dual_finsler(*m.fam).with_invariant(m.invariant),
                                                sc.integrator);
        m.geo_path = m.path;
    }
    return m;
}

// Independent sub-streams per task, so adding rays to one task leaves the others' samples unchanged.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t task) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(task)};
    return std::mt19937_64(seq);
}

Vec random_point(std::mt19937_64& rng, const Model& m) {
    const int n = m.base.dim();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec p(n);
    for (int i = 0; i < n; ++i) {
        const double x = u(rng);
        p[i] = m.base.topology() == Topology::torus ? x * m.base.periods()[i] : 2.0 * x - 1.0;
    }
    return p;
}

Vec random_direction(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    do {
        for (int i = 0; i < n; ++i) v[i] = g(rng);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

class Checks {
public:
    Checks(RunResult& r, std::ostream& log, double scale) : r_(r), log_(log), scale_(scale) {}

    // value <= tol * scale
    void at_most(const std::string& task, const std::string& name, double value, double tol, bool asserted = true) {
        add(task, name, value, "<=", tol * scale_, std::isfinite(value) && value <= tol * scale_, asserted);
    }
    // value >= tol / scale
    void at_least(const std::string& task, const std::string& name, double value, double tol, bool asserted = true) {
        add(task, name, value, ">=", tol / scale_, std::isfinite(value) && value >= tol / scale_, asserted);
    }
    void raw(const std::string& task, const std::string& name, double value, const std::string& rel, double bound,
             bool pass, bool asserted = true, const std::string& note = {}) {
        add(task, name, value, rel, bound, pass, asserted, note);
    }

private:
    void add(const std::string& task, const std::string& name, double value, const std::string& rel, double bound,
             bool pass, bool asserted, const std::string& note = {}) {
        r_.checks.push_back({task, name, value, rel, bound, asserted, pass, note});
        log_ << (asserted ? (pass ? "PASS " : "FAIL ") : "INFO ") << task << '.' << name << " = " << value << ' ' << rel
             << ' ' << bound;
        if (!note.empty()) log_ << "  (" << note << ')';
        log_ << '\n';
    }

    RunResult& r_;
    std::ostream& log_;
    double scale_;
};

std::string csv_preamble(const Scenario& sc) { return "# scenario=" + sc.name + " seed=" + std::to_string(sc.seed) + "\n"; }

nlohmann::json json_envelope(const Scenario& sc, const std::string& task) {
    return {{"scenario", sc.name}, {"seed", sc.seed}, {"task", task}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

// ---------------------------------------------------------------- tasks

std::string task_geodesics(Model& m, Checks& ck) {
    const int n = m.base.dim();
    const int rays = m.sc.rays;
    const double step = m.sc.integrator.step;
    auto rng = stream(m.sc.seed, 1);
    std::vector<RayPoint> starts;
    for (int i = 0; i < rays; ++i) {
        const Vec p = random_point(rng, m);
        starts.push_back(RayPoint::unit(p, random_direction(rng, n)));
    }

    struct Out {
        SpacetimeTrajectory cone;
        std::vector<double> deviation;
        double lag_null = 0.0;
        double straight = 0.0;
        std::string error;
    };
    std::vector<Out> outs(rays);
    const bool flat = m.sc.kind == "euclidean";
    detail::parallel_for(rays, [&](std::ptrdiff_t i) {
        Out& o = outs[i];
        try {
            o.cone = cone_geodesic(*m.geo_path, starts[i], 0.0, 1.0);
            const SpacetimeVector sv{1.0, TangentVector{o.cone.w.front()}};
            const SpacetimeTrajectory lag =
                lagrangian_geodesic(*m.fam, SpacetimeEvent{0.0, BasePoint(starts[i].p)}, sv, 1.0, step);
            if (lag.size() != o.cone.size()) throw NumericalError("geodesic grids differ", 0.0);
            o.deviation.resize(lag.size());
            for (std::size_t k = 0; k < lag.size(); ++k) {
                o.deviation[k] = (o.cone.p[k] - lag.p[k]).norm();
                o.lag_null = std::max(o.lag_null, std::abs(lag.null_residual[k]));
                if (flat) {
                    const Vec line = starts[i].p + o.cone.t[k] * o.cone.w.front();
                    o.straight = std::max(o.straight, (o.cone.p[k] - line).norm());
                }
            }
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    });

    double dev = 0.0, cone_null = 0.0, lag_null = 0.0, straight = 0.0;
    std::string errors;
    std::ostringstream csv;
    csv << csv_preamble(m.sc) << "ray,t";
    for (int j = 0; j < n; ++j) csv << ",p" << j + 1;
    csv << ",null_residual,lagrangian_deviation\n";
    for (int i = 0; i < rays; ++i) {
        const Out& o = outs[i];
        if (!o.error.empty()) {
            errors += "ray " + std::to_string(i) + ": " + o.error + "; ";
            continue;
        }
        lag_null = std::max(lag_null, o.lag_null);
        straight = std::max(straight, o.straight);
        const std::size_t stride = std::max<std::size_t>(1, (o.cone.size() - 1) / 100);
        for (std::size_t k = 0; k < o.cone.size(); ++k) {
            dev = std::max(dev, o.deviation[k]);
            cone_null = std::max(cone_null, std::abs(o.cone.null_residual[k]));
            if (k % stride != 0 && k + 1 != o.cone.size()) continue;
            csv << i << ',' << num(o.cone.t[k]);
            for (int j = 0; j < n; ++j) csv << ',' << num(o.cone.p[k][j]);
            csv << ',' << num(o.cone.null_residual[k]) << ',' << num(o.deviation[k]) << '\n';
        }
    }
    if (!errors.empty()) ck.raw("geodesics", "integration", 1.0, "==", 0.0, false, true, errors);
    ck.at_most("geodesics", "cross_method_sup_distance", dev, m.sc.tolerance("cross_method"));
    ck.at_most("geodesics", "cone_null_residual", cone_null, m.sc.tolerance("null_residual"));
    ck.at_most("geodesics", "lagrangian_null_residual", lag_null, m.sc.tolerance("null_residual"));
    if (flat) ck.at_most("geodesics", "straight_line_error", straight, m.sc.tolerance("straightness"));
    return csv.str();
}

std::string task_roundtrip(Model& m, Checks& ck) {
    ConeStructure cone(m.base, *m.fam);
    RoundtripGrid grid;
    grid.times = m.sc.roundtrip_times;
    grid.points = m.sc.roundtrip_points;
    grid.directions = m.sc.directions;
    grid.seed = static_cast<unsigned>(m.sc.seed);
    grid.tol_hausdorff = m.sc.tolerance("hausdorff");
    grid.tol_g = m.sc.tolerance("g");
    const RoundtripReport rep = roundtrip_check(cone, grid, m.sc.integrator);
    ck.at_most("roundtrip", "max_slice_hausdorff", rep.max_hausdorff, grid.tol_hausdorff);
    ck.at_most("roundtrip", "max_g_error", rep.max_g_error, grid.tol_g);
    nlohmann::json j = json_envelope(m.sc, "roundtrip");
    j["report"] = rep.to_json();
    return j.dump(2) + "\n";
}

std::string task_positivity(Model& m, Checks& ck) {
    const int n = m.base.dim();
    const PositivePath& path = *m.path;
    const PositivePath rev = path.reversed();
    const Generator& gen = path.generator();
    auto rng = stream(m.sc.seed, 2);
    std::vector<RayPoint> rays;
    for (int i = 0; i < m.sc.rays; ++i) {
        const Vec p = random_point(rng, m);
        rays.push_back({p, random_direction(rng, n), Normalization::unit_dual_finsler, 0.0});
    }
    const std::vector<double> times = {0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> reeb_times = {0.0, 0.5, 1.0};
    const int nr = static_cast<int>(rays.size());
    const int nt = static_cast<int>(times.size());

    std::vector<double> fwd(nr * nt), bwd(nr * nt);
    std::vector<double> alpha(nr * reeb_times.size()), contraction(alpha.size()), volume(alpha.size());
    std::vector<std::string> errors(nr);
    detail::parallel_for(nr, [&](std::ptrdiff_t i) {
        try {
            for (int k = 0; k < nt; ++k) {
                fwd[i * nt + k] = positivity_margin(path, times[k], rays[i]);
                bwd[i * nt + k] = positivity_margin(rev, times[k], rays[i]);
            }
            // Reeb conditions along the flow line of the ray.
            const Trajectory tr = integrate_cogeodesic(gen, rays[i], 0.0, reeb_times.back(), m.sc.integrator.step);
            for (std::size_t k = 0; k < reeb_times.size(); ++k) {
                const std::size_t idx = static_cast<std::size_t>(std::lround(reeb_times[k] / reeb_times.back() * (tr.size() - 1)));
                const ContactSample s = make_contact_sample(gen, tr.t[idx], tr.p[idx], tr.lifted(idx));
                const ReebReport rr = verify_reeb_conditions(path, s);
                alpha[i * reeb_times.size() + k] = rr.alpha_of_X - 1.0;
                contraction[i * reeb_times.size() + k] = rr.max_dalpha_contraction;
                volume[i * reeb_times.size() + k] = contact_volume(s);
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::string err;
    for (int i = 0; i < nr; ++i)
        if (!errors[i].empty()) err += "ray " + std::to_string(i) + ": " + errors[i] + "; ";
    if (!err.empty()) ck.raw("positivity", "integration", 1.0, "==", 0.0, false, true, err);

    const double min_fwd = *std::min_element(fwd.begin(), fwd.end());
    const double max_bwd = *std::max_element(bwd.begin(), bwd.end());
    double max_alpha = 0.0, max_contr = 0.0, min_vol = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        max_alpha = std::max(max_alpha, std::abs(alpha[k]));
        max_contr = std::max(max_contr, contraction[k]);
        min_vol = std::min(min_vol, volume[k]);
    }
    ck.raw("positivity", "min_margin", min_fwd, ">", 0.0, min_fwd > 0.0);
    ck.raw("positivity", "reversed_max_margin", max_bwd, "<", 0.0, max_bwd < 0.0);
    ck.at_most("positivity", "reeb_alpha_defect", max_alpha, m.sc.tolerance("alpha"));
    ck.at_most("positivity", "reeb_dalpha_contraction", max_contr, m.sc.tolerance("dalpha"));
    ck.raw("positivity", "min_contact_volume", min_vol, ">", 0.0, min_vol > 0.0);

    std::ostringstream csv;
    csv << csv_preamble(m.sc) << "check,t,ray,value\n";
    for (int i = 0; i < nr; ++i)
        for (int k = 0; k < nt; ++k) csv << "margin," << num(times[k]) << ',' << i << ',' << num(fwd[i * nt + k]) << '\n';
    for (int i = 0; i < nr; ++i)
        for (int k = 0; k < nt; ++k)
            csv << "reversed_margin," << num(times[k]) << ',' << i << ',' << num(bwd[i * nt + k]) << '\n';
    const std::size_t nk = reeb_times.size();
    for (int i = 0; i < nr; ++i)
        for (std::size_t k = 0; k < nk; ++k) {
            csv << "alpha_minus_one," << num(reeb_times[k]) << ',' << i << ',' << num(alpha[i * nk + k]) << '\n';
            csv << "dalpha_contraction," << num(reeb_times[k]) << ',' << i << ',' << num(contraction[i * nk + k]) << '\n';
            csv << "contact_volume," << num(reeb_times[k]) << ',' << i << ',' << num(volume[i * nk + k]) << '\n';
        }
    return csv.str();
}

// sup of the Finsler norm of e over a (t, p) grid, for a curve that stays uniformly timelike.
double sup_norm_along(const Model& m, const Vec& e) {
    const int n = m.base.dim();
    double sup = 0.0;
    const int k = m.invariant ? 1 : 8;
    for (int it = 0; it <= (m.invariant ? 0 : 10); ++it)
        for (int idx = 0; idx < std::pow(k, n); ++idx) {
            Vec p(n);
            int rem = idx;
            for (int j = 0; j < n; ++j, rem /= k) {
                const double frac = double(rem % k) / k;
                p[j] = m.base.topology() == Topology::torus ? frac * m.base.periods()[j] : 2.0 * frac - 1.0;
            }
            sup = std::max(sup, m.fam->at(0.1 * it, p).norm(e));
        }
    return sup;
}

std::string task_skies(Model& m, Checks& ck) {
    const int n = m.base.dim();
    const PositivePath& path = *m.path;
    auto rng = stream(m.sc.seed, 3);
    std::vector<double> s;
    for (int k = 0; k <= 5; ++k) s.push_back(0.2 * k);

    // Timelike curve: straight in the chart, with Finsler speed at most 1/2.
    const Vec p0 = random_point(rng, m);
    const Vec e = random_direction(rng, n);
    const double speed = 0.5 / sup_norm_along(m, e);
    const SpacetimeCurve timelike = [p0, e, speed](double si) { return CurvePoint{si, p0 + si * speed * e}; };
    const SkyIsotopy iso = sky_isotopy_positivity(path, timelike, s, m.sc.sky_rays);
    ck.at_least("skies", "timelike_curve_min_abs_margin", -iso.max_margin, m.sc.tolerance("timelike_margin"));
    ck.raw("skies", "timelike_curve_verdict", iso.max_margin, "<", 0.0, iso.verdict == "timelike-consistent", true,
           iso.verdict);

    // Cone geodesics of the path: the tangent ray of the sky stays put to first order.
    const int ng = std::min(m.sc.rays, 5);
    std::vector<RayPoint> starts;
    for (int i = 0; i < ng; ++i) {
        const Vec p = random_point(rng, m);
        starts.push_back(RayPoint::unit(p, random_direction(rng, n)));
    }
    std::vector<double> tangent(ng * s.size());
    detail::parallel_for(ng, [&](std::ptrdiff_t i) {
        const RayPoint start = starts[i];
        const SpacetimeCurve geo = [&path, start](double si) {
            const RayPoint r = path_apply(path, si, start);
            return CurvePoint{si, r.p};
        };
        for (std::size_t k = 0; k < s.size(); ++k) {
            const RayPoint here = path_apply(path, s[k], start);
            tangent[i * s.size() + k] = isotopy_margin(path, geo, s[k], here.v);
        }
    });
    double max_tangent = 0.0;
    for (double x : tangent) max_tangent = std::max(max_tangent, std::abs(x));
    ck.at_most("skies", "geodesic_tangent_ray_margin", max_tangent, m.sc.tolerance("tangent_margin"));

    std::ostringstream csv;
    csv << csv_preamble(m.sc) << "curve,s,ray,margin\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        for (std::size_t i = 0; i < iso.margins[k].size(); ++i)
            csv << "timelike," << num(s[k]) << ',' << i << ',' << num(iso.margins[k][i]) << '\n';
    for (int i = 0; i < ng; ++i)
        for (std::size_t k = 0; k < s.size(); ++k)
            csv << "geodesic_tangent," << num(s[k]) << ',' << i << ',' << num(tangent[i * s.size() + k]) << '\n';
    return csv.str();
}

std::string task_lipschitz(Model& m, Checks& ck) {
    const int n = m.base.dim();
    LorentzFinslerRegion reg;
    reg.p_lo = Vec::Zero(n);
    reg.p_hi = Vec::Ones(n);
    reg.seed = static_cast<unsigned>(m.sc.seed);
    const LorentzFinslerReport rep = check_lorentz_finsler_space(m.cone_f(), reg);
    ck.at_most("lipschitz", "homogeneity_violation", rep.max_homogeneity_violation, m.sc.tolerance("violation"));
    ck.at_most("lipschitz", "concavity_violation", rep.max_concavity_violation, m.sc.tolerance("violation"));
    ck.raw("lipschitz", "estimate_finite", rep.lipschitz, "<", std::numeric_limits<double>::infinity(),
           rep.lipschitz_finite);
    const double big = std::max(rep.lipschitz, rep.lipschitz_half_step);
    const double rel = big < 1e-12 ? 0.0 : std::abs(rep.lipschitz - rep.lipschitz_half_step) / big;
    ck.at_most("lipschitz", "half_step_relative_change", rel, m.sc.tolerance("lipschitz_rel"));
    nlohmann::json j = json_envelope(m.sc, "lipschitz");
    j["report"] = rep.to_json();
    j["region"] = {{"t", {reg.t_lo, reg.t_hi}}, {"p_lo", vec_to_json(reg.p_lo)}, {"p_hi", vec_to_json(reg.p_hi)},
                   {"step", reg.lipschitz_step}};
    return j.dump(2) + "\n";
}

std::string task_probe(Model& m, Checks& ck) {
    const int n = m.base.dim();
    auto rng = stream(m.sc.seed, 4);
    std::vector<RayPoint> rays;
    for (int i = 0; i < m.sc.probe_rays; ++i) {
        const Vec p = random_point(rng, m);
        rays.push_back(RayPoint::unit(p, random_direction(rng, n)));
    }
    const ProbeReport rep = cauchy_crossing_probe(*m.path, m.cone_f(), rays, m.sc.probe_horizon, m.sc.probe_step);
    // Evidence only: asserted for strongly convex data, recorded for non-convex gauges.
    const bool asserted = m.sc.kind != "gauge";
    ck.raw("probe", "single_crossing_fraction", rep.single_crossing_fraction(), "==", 1.0,
           rep.single_crossing_fraction() == 1.0, asserted, asserted ? "" : "recorded, not asserted");
    nlohmann::json j = json_envelope(m.sc, "probe");
    j["asserted"] = asserted;
    j["report"] = rep.to_json();
    return j.dump(2) + "\n";
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& opts, std::ostream& log) {
    Scenario sc = scenario;
    if (opts.seed) sc.seed = *opts.seed;
    if (opts.step) sc.integrator.step = *opts.step;
    if (!(opts.tol_scale > 0.0)) throw DomainError("tolerance scale must be positive");

    Model m = build_model(sc);
    RunResult result;
    Checks ck(result, log, opts.tol_scale);
    fs::create_directories(opts.out_dir);

    struct Task {
        const char* name;
        const char* file;
        std::string (*fn)(Model&, Checks&);
    };
    const Task tasks[] = {
        {"geodesics", "geodesics.csv", task_geodesics},   {"roundtrip", "roundtrip.json", task_roundtrip},
        {"positivity", "positivity.csv", task_positivity}, {"skies", "skies.csv", task_skies},
        {"lipschitz", "lipschitz.json", task_lipschitz},  {"probe", "probe.json", task_probe},
    };
    for (const Task& t : tasks) {
        if (!sc.has_task(t.name)) continue;
        if (std::string(t.name) == "roundtrip" && sc.kind == "gauge") {
            result.skipped.push_back("roundtrip: the gauge kind has no Finsler metric to recover");
            log << "SKIP roundtrip (gauge kind has no Finsler metric to recover)\n";
            continue;
        }
        std::string content;
        try {
            content = t.fn(m, ck);
        } catch (const DomainError&) {
            throw;
        } catch (const std::exception& e) {
            ck.raw(t.name, "error", 1.0, "==", 0.0, false, true, e.what());
            continue;
        }
        write_file(fs::path(opts.out_dir) / t.file, content);
        result.artifacts.emplace_back(t.file);
    }
    return result;
}

// ---------------------------------------------------------------- export

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("artifact is missing column '" + name + "'");
        return static_cast<int>(it - header.begin());
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

Table read_csv(const fs::path& path) {
    std::ifstream in(path);
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty()) t.header = split(line);
        else t.rows.push_back(split(line));
    }
    if (t.header.empty()) throw std::runtime_error("artifact '" + path.string() + "' has no header row");
    return t;
}

}  // namespace

std::vector<std::string> export_plotdata(const std::string& artifact_dir) {
    const fs::path dir(artifact_dir);
    const fs::path plot = dir / "plot";
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        fs::create_directories(plot);
        write_file(plot / name, content);
        written.push_back((fs::path("plot") / name).string());
    };

    if (fs::exists(dir / "geodesics.csv")) {
        const Table t = read_csv(dir / "geodesics.csv");
        std::vector<int> pc;
        for (int j = 1; j <= 3; ++j)
            if (std::find(t.header.begin(), t.header.end(), "p" + std::to_string(j)) != t.header.end())
                pc.push_back(t.column("p" + std::to_string(j)));
        const int tc = t.column("t"), nc = t.column("null_residual");
        std::ostringstream out;
        out << 't';
        for (std::size_t j = 0; j < pc.size(); ++j) out << ',' << axis_name(static_cast<int>(j));
        out << ",null_residual\n";
        for (const auto& r : t.rows) {
            out << r[tc];
            for (int c : pc) out << ',' << r[c];
            out << ',' << r[nc] << '\n';
        }
        emit("geodesics.csv", out.str());
    }
    if (fs::exists(dir / "positivity.csv")) {
        const Table t = read_csv(dir / "positivity.csv");
        const int cc = t.column("check"), tc = t.column("t"), rc = t.column("ray"), vc = t.column("value");
        std::ostringstream out;
        out << "t,ray,margin\n";
        for (const auto& r : t.rows)
            if (r[cc] == "margin") out << r[tc] << ',' << r[rc] << ',' << r[vc] << '\n';
        emit("positivity.csv", out.str());
    }
    if (fs::exists(dir / "skies.csv")) {
        const Table t = read_csv(dir / "skies.csv");
        const int cc = t.column("curve"), sc = t.column("s"), rc = t.column("ray"), mc = t.column("margin");
        std::ostringstream out;
        out << "s,ray,margin\n";
        for (const auto& r : t.rows)
            if (r[cc] == "timelike") out << r[sc] << ',' << r[rc] << ',' << r[mc] << '\n';
        emit("skies.csv", out.str());
    }
    if (fs::exists(dir / "roundtrip.json")) {
        std::ifstream in(dir / "roundtrip.json");
        const nlohmann::json j = nlohmann::json::parse(in);
        const auto& cells = j.at("report").at("cells");
        const std::size_t n = cells.empty() ? 0 : cells.front().at("p").size();
        std::ostringstream out;
        out << 't';
        for (std::size_t k = 0; k < n; ++k) out << ',' << axis_name(static_cast<int>(k));
        out << ",hausdorff,g_error\n";
        for (const auto& c : cells) {
            out << num(c.at("t").get<double>());
            for (const auto& x : c.at("p")) out << ',' << num(x.get<double>());
            out << ',' << num(c.at("hausdorff").get<double>()) << ',' << num(c.at("g_error").get<double>()) << '\n';
        }
        emit("roundtrip.csv", out.str());
    }
    if (written.empty()) throw std::runtime_error("no artifacts found in '" + artifact_dir + "'");
    return written;
}

}  // namespace conepath

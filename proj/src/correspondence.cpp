#include "conepath/correspondence.hpp"

#include "conepath/detail/parallel.hpp"
#include "conepath/directions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

namespace conepath {

namespace {

using BodyAt = std::function<StarBody(double t, const Vec& p)>;

// Per-thread memo of the last few fibres. Consumers evaluate one fibre many
// times in a row (support scans, finite differences in w), so a tiny cache
// removes almost all re-sampling without any locking.
BodyAt memoize(BodyAt make) {
    struct Entry {
        const void* owner = nullptr;
        double t = 0.0;
        Vec p;
        std::optional<StarBody> body;
    };
    auto token = std::make_shared<char>();
    return [make = std::move(make), token](double t, const Vec& p) {
        constexpr int kSlots = 8;
        thread_local Entry slots[kSlots];
        thread_local int next = 0;
        for (Entry& e : slots)
            if (e.owner == token.get() && e.t == t && e.p.size() == p.size() && e.p == p) return *e.body;
        Entry& e = slots[next];
        next = (next + 1) % kSlots;
        e.body = make(t, p);
        e.owner = token.get();
        e.t = t;
        e.p = p;
        return *e.body;
    };
}

BodyAt constant_body(StarBody body) {
    return [body = std::move(body)](double, const Vec&) { return body; };
}

}  // namespace

PositivePath path_from_cone(const ConeStructure& cone, IntegratorConfig cfg) {
    return PositivePath::from_finsler(cone.base(), cone.finsler(), cfg);
}

// ---------------------------------------------------------------- slice gauges

namespace {

using Member = std::function<bool(double r)>;

// sup { r >= 0 : member(r) } for a star-shaped slice.
double boundary_radius(const Member& member) {
    if (!member(1e-12)) throw DomainError("slice does not contain the origin in its interior");
    double lo = 0.0, hi = 1.0;
    while (member(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw DomainError("slice is unbounded");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (member(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

FinslerFamily finsler_from_cone_slices(const ConeStructure& cone) {
    return FinslerFamily::custom(cone.dim(), [cone](double t, const Vec& p, const Vec& w) {
        const double len = w.norm();
        const Vec u = w / len;
        const double r = boundary_radius(
            [&](double s) { return cone.contains(t, p, SpacetimeVector{1.0, TangentVector{s * u}}, 0.0); });
        return len / r;
    });
}

FinslerFamily finsler_from_cone_slices(const LorentzFinslerSpace& space) {
    const int n = space.dim();
    if (!space.has_coballs()) {
        return FinslerFamily::custom(n, [space](double t, const Vec& p, const Vec& w) {
            const double len = w.norm();
            const Vec u = w / len;
            const double r = boundary_radius([&](double s) { return space.G(t, p, SpacetimeVector{1.0, TangentVector{s * u}}) >= 0.0; });
            return len / r;
        });
    }
    // The gauge of K° is h_K. The dual is left to the generic maximization so
    // that dF*/dv is an exact maximizer even where K° has corners.
    return FinslerFamily::custom(
        n, [space](double t, const Vec& p, const Vec& w) { return support_function(space.coball(t, p), w); });
}

// ---------------------------------------------------------------- path -> cone

LorentzFinslerSpace cone_from_path(const PositivePath& path, const ConeFromPathOptions& opts) {
    const int n = path.dim();
    const Generator& gen = path.generator();

    // Positivity precheck at t = 0 over a small ray sample.
    const DirectionSet probe = DirectionSet::standard(n, n == 1 ? 2 : std::max(2, opts.positivity_rays));
    const Vec p0 = path.base().wrap(Vec::Zero(n));
    for (int i = 0; i < probe.size(); ++i) {
        const RayPoint ray{p0, probe[i], Normalization::unit_dual_finsler, 0.0};
        if (!(gen.value(0.0, p0, probe[i]) > 0.0) || !(positivity_margin(path, 0.0, ray) > 0.0))
            throw DomainError("path not positive: nonpositive margin at a sampled ray");
    }

    const DirectionSet dirs = DirectionSet::standard(n, opts.directions > 0 ? opts.directions : DirectionSet::default_count(n));
    BodyAt make = [gen, dirs](double t, const Vec& p) {
        std::vector<double> radii(dirs.size());
        for (int i = 0; i < dirs.size(); ++i) {
            const double h = gen.value(t, p, dirs[i]);
            if (!(h > 0.0)) throw DomainError("path not positive: generator vanishes on the unit co-ball");
            radii[i] = 1.0 / h;
        }
        return StarBody::from_samples(dirs, std::move(radii));
    };
    BodyAt coball = gen.invariant() ? constant_body(make(0.0, p0)) : memoize(std::move(make));
    return LorentzFinslerSpace::from_coballs(n, std::move(coball));
}

// ---------------------------------------------------------------- roundtrip

nlohmann::json RoundtripReport::to_json() const {
    nlohmann::json j;
    j["max_hausdorff"] = max_hausdorff;
    j["max_g_error"] = max_g_error;
    j["tol_hausdorff"] = tol_hausdorff;
    j["tol_g"] = tol_g;
    j["pass"] = pass();
    j["directions"] = directions;
    j["integrator"] = {{"scheme", "rk4"}, {"step", config.step}, {"horizon", config.horizon}};
    auto arr = nlohmann::json::array();
    for (const auto& c : cells) arr.push_back({{"t", c.t}, {"p", vec_to_json(c.p)}, {"hausdorff", c.hausdorff}, {"g_error", c.g_error}});
    j["cells"] = arr;
    return j;
}

RoundtripReport roundtrip_check(const ConeStructure& cone, const RoundtripGrid& grid, IntegratorConfig cfg) {
    const int n = cone.dim();
    const int m = grid.directions > 0 ? grid.directions : DirectionSet::default_count(n);
    const PositivePath path = path_from_cone(cone, cfg);
    const LorentzFinslerSpace space = cone_from_path(path, {m, 16});

    Vec lo = grid.p_lo, hi = grid.p_hi;
    if (lo.size() == 0) {
        const bool torus = cone.base().topology() == Topology::torus;
        lo = torus ? Vec::Zero(n) : Vec::Constant(n, -1.0);
        hi = torus ? cone.base().periods() : Vec::Constant(n, 1.0);
    }
    std::mt19937_64 rng(grid.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> points;
    for (int i = 0; i < grid.points; ++i) {
        Vec p(n);
        for (int k = 0; k < n; ++k) p[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
        points.push_back(cone.base().wrap(p));
    }
    std::vector<double> times;
    for (int i = 0; i < grid.times; ++i)
        times.push_back(grid.times == 1 ? grid.t_lo : grid.t_lo + (grid.t_hi - grid.t_lo) * i / (grid.times - 1));

    RoundtripReport report;
    report.config = cfg;
    report.directions = m;
    report.tol_hausdorff = grid.tol_hausdorff;
    report.tol_g = grid.tol_g;
    report.cells.resize(times.size() * points.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(report.cells.size()), [&](std::ptrdiff_t idx) {
        const double t = times[idx / points.size()];
        const Vec& p = points[idx % points.size()];
        const StarBody original = cone_slice(cone, t, BasePoint(p), m);
        const StarBody recovered = space.slice(t, p);
        // 2m - 1 directions: almost none coincide with the co-ball sample directions.
        RoundtripCell cell{t, p, hausdorff_distance(original, recovered, n == 1 ? 2 : 2 * m - 1), 0.0};

        std::mt19937_64 local(grid.seed * 7919ULL + static_cast<unsigned long long>(idx));
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> w0(-1.0, 2.0);
        const LocalNorm F = cone.finsler().at(t, p);
        for (int s = 0; s < grid.g_samples; ++s) {
            SpacetimeVector sv{w0(local), TangentVector{Vec(n)}};
            for (int k = 0; k < n; ++k) sv.w.c[k] = gauss(local);
            cell.g_error = std::max(cell.g_error, std::abs(space.G(t, p, sv) - (sv.w0 - F.norm(sv.w.c))));
        }
        report.cells[idx] = cell;
    });
    for (const auto& c : report.cells) {
        report.max_hausdorff = std::max(report.max_hausdorff, c.hausdorff);
        report.max_g_error = std::max(report.max_g_error, c.g_error);
    }
    return report;
}

void write_roundtrip_csv(std::ostream& out, const RoundtripReport& report) {
    const int n = report.cells.empty() ? 0 : static_cast<int>(report.cells.front().p.size());
    out << 't';
    for (int k = 0; k < n; ++k) out << ",p" << (k + 1);
    out << ",hausdorff,g_error\n";
    char buf[64];
    auto put = [&](double x) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), x);
        out.write(buf, res.ptr - buf);
    };
    for (const auto& c : report.cells) {
        put(c.t);
        for (int k = 0; k < n; ++k) out << ',', put(c.p[k]);
        out << ',', put(c.hausdorff);
        out << ',', put(c.g_error);
        out << '\n';
    }
}

// ---------------------------------------------------------------- crossing probe

nlohmann::json ProbeReport::to_json() const {
    nlohmann::json j;
    j["experimental"] = true;
    j["note"] = "empirical evidence only; not a proof of global hyperbolicity";
    j["horizon"] = horizon;
    j["rays"] = rays.size();
    j["single_crossing"] = single_crossing;
    j["single_crossing_fraction"] = single_crossing_fraction();
    j["blow_ups"] = blow_ups;
    j["acausal_tangents"] = acausal;
    auto arr = nlohmann::json::array();
    for (const auto& r : rays) {
        nlohmann::json e{{"p", vec_to_json(r.ray.p)}, {"v", vec_to_json(r.ray.v)}, {"crossings", r.crossings},
                         {"blow_up", r.blow_up}, {"max_causal_excess", r.max_causal_excess}};
        if (!r.error.empty()) e["error"] = r.error;
        arr.push_back(e);
    }
    j["per_ray"] = arr;
    return j;
}

ProbeReport cauchy_crossing_probe(const PositivePath& path, const LorentzFinslerSpace& space,
                                  const std::vector<RayPoint>& rays, double horizon, double step) {
    if (!(horizon > 0.0)) throw DomainError("probe: horizon must be positive");
    const Generator& gen = path.generator();
    ProbeReport report;
    report.horizon = horizon;
    report.rays.resize(rays.size());

    detail::parallel_for(static_cast<std::ptrdiff_t>(rays.size()), [&](std::ptrdiff_t i) {
        ProbeRay& out = report.rays[i];
        out.ray = rays[i];
        std::vector<double> ts;
        std::vector<std::pair<Vec, Vec>> states;
        try {
            const Trajectory back = integrate_cogeodesic(gen, rays[i], 0.0, -horizon, step);
            const Trajectory fwd = integrate_cogeodesic(gen, rays[i], 0.0, horizon, step);
            for (std::size_t k = back.size(); k-- > 1;) ts.push_back(back.t[k]), states.push_back({back.p[k], back.v[k]});
            for (std::size_t k = 0; k < fwd.size(); ++k) ts.push_back(fwd.t[k]), states.push_back({fwd.p[k], fwd.v[k]});
        } catch (const IntegrationError& e) {
            out.blow_up = true;
            out.error = e.what();
            return;
        }
        // Crossings of {t = 0}: sign changes of t along the curve, a sample at 0 counting once.
        for (std::size_t k = 0; k + 1 < ts.size(); ++k)
            if ((ts[k] < 0.0 && ts[k + 1] >= 0.0) || (ts[k] > 0.0 && ts[k + 1] <= 0.0)) ++out.crossings;

        const FinslerFamily* fam = gen.finsler();
        const std::size_t stride = fam ? 1 : std::max<std::size_t>(1, ts.size() / 40);
        for (std::size_t k = 0; k < ts.size(); k += stride) {
            const Vec w = gen.grad_v(ts[k], states[k].first, states[k].second);
            const double excess = fam ? fam->at(ts[k], states[k].first).norm(w) - 1.0
                                      : support_function(space.coball(ts[k], states[k].first), w) - 1.0;
            out.max_causal_excess = std::max(out.max_causal_excess, excess);
        }
    });
    for (const auto& r : report.rays) {
        if (r.blow_up) ++report.blow_ups;
        if (!r.blow_up && r.crossings == 1) ++report.single_crossing;
        if (r.max_causal_excess > 1e-6) ++report.acausal;
    }
    return report;
}

}  // namespace conepath

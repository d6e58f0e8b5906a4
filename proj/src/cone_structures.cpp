#include "conepath/cone_structures.hpp"

#include "conepath/detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace conepath {

const char* to_string(CausalType type) {
    switch (type) {
        case CausalType::future_timelike: return "future-timelike";
        case CausalType::future_null: return "future-null";
        case CausalType::past_timelike: return "past-timelike";
        case CausalType::past_null: return "past-null";
        case CausalType::non_causal: return "non-causal";
    }
    return "?";
}

ConeStructure::ConeStructure(BaseManifold base, FinslerFamily finsler) : base_(std::move(base)), finsler_(std::move(finsler)) {
    if (base_.dim() != finsler_.dim()) throw DomainError("cone structure: base and metric dimensions differ");
}

double ConeStructure::lorentz_finsler(double t, const Vec& p, const SpacetimeVector& sv) const {
    const double f = finsler_.at(t, p).norm(sv.w.c);
    return sv.w0 * sv.w0 - f * f;
}

bool ConeStructure::contains(double t, const Vec& p, const SpacetimeVector& sv, double tol) const {
    return sv.w0 >= finsler_.at(t, p).norm(sv.w.c) - tol;
}

CausalType classify(const ConeStructure& cone, double t, const BasePoint& p, const SpacetimeVector& sv) {
    const Vec& w = sv.w.c;
    if (w.size() != cone.dim()) throw DomainError("classify: dimension mismatch");
    const double len = std::sqrt(sv.w0 * sv.w0 + w.squaredNorm());
    if (!(len > 0.0)) throw DomainError("classify: zero vector");
    if (w.isZero(0.0)) return sv.w0 > 0.0 ? CausalType::future_timelike : CausalType::past_timelike;

    const LocalNorm F = cone.finsler().at(t, p.coords());
    const double tol = 1e-9 * len;
    // F is not reversible in general, so the past test uses F(-w).
    const double future = sv.w0 - F.norm(w);
    const double past = -sv.w0 - F.norm(-w);
    if (std::abs(future) <= tol) return CausalType::future_null;
    if (future > 0.0) return CausalType::future_timelike;
    if (std::abs(past) <= tol) return CausalType::past_null;
    if (past > 0.0) return CausalType::past_timelike;
    return CausalType::non_causal;
}

StarBody cone_slice(const ConeStructure& cone, double t, const BasePoint& p, int m) {
    const LocalNorm F = cone.finsler().at(t, p.coords());
    return StarBody::closed_form(cone.dim(), [F](const Vec& u) { return 1.0 / F.norm(u); }, m);
}

// ---------------------------------------------------------------- Lorentz-Finsler spaces

LorentzFinslerSpace LorentzFinslerSpace::from_coballs(int n, CoballFn coball) {
    if (!coball) throw DomainError("from_coballs: empty co-ball field");
    GFn g = [coball](double t, const Vec& p, const SpacetimeVector& sv) {
        if (sv.w.c.isZero(0.0)) return sv.w0;
        return sv.w0 - support_function(coball(t, p), sv.w.c);
    };
    return LorentzFinslerSpace(n, std::move(g), std::move(coball));
}

LorentzFinslerSpace LorentzFinslerSpace::from_function(int n, GFn g, CoballFn coball) {
    if (!g) throw DomainError("from_function: empty G");
    return LorentzFinslerSpace(n, std::move(g), std::move(coball));
}

bool LorentzFinslerSpace::contains(double t, const Vec& p, const SpacetimeVector& sv, double tol) const {
    return G(t, p, sv) >= -tol;
}

StarBody LorentzFinslerSpace::coball(double t, const Vec& p) const {
    if (!coball_) throw DomainError("Lorentz-Finsler space carries no co-ball field");
    return coball_(t, p);
}

StarBody LorentzFinslerSpace::slice(double t, const Vec& p) const { return polar(coball(t, p)); }

double G_eval(const LorentzFinslerSpace& space, double t, const BasePoint& p, const SpacetimeVector& sv) {
    if (!std::isfinite(sv.w0) || !sv.w.c.allFinite()) throw DomainError("G_eval: non-finite vector");
    return space.G(t, p.coords(), sv);
}

StarBody doubled_cone_slice(const StarBody& coball, int m) {
    const int n = coball.dim();
    // h_A(u0, u) = |u0| + h_K(u); its reciprocal is the radial function of A°.
    auto radial = [coball, n](const Vec& d) {
        const Vec u = d.tail(n);
        const double hk = u.norm() > 0.0 ? support_function(coball, u) : 0.0;
        return 1.0 / (std::abs(d[0]) + hk);
    };
    // h_{A°} is the gauge of conv(A) = conv(K) x [-1, 1], i.e. max(|u0|, h_{K°}(u)).
    StarBody::SupportFn gauge;
    if (is_convex(coball)) {
        gauge = [coball, n](const Vec& w) {
            const Vec u = w.tail(n);
            const double len = u.norm();
            const double gk = len > 0.0 ? len / coball.radial(u / len) : 0.0;
            return std::max(std::abs(w[0]), gk);
        };
    } else {
        gauge = [kpolar = polar(coball), n](const Vec& w) {
            const Vec u = w.tail(n);
            const double gk = u.norm() > 0.0 ? support_function(kpolar, u) : 0.0;
            return std::max(std::abs(w[0]), gk);
        };
    }
    return StarBody::closed_form(n + 1, radial, m).with_support(std::move(gauge));
}

// ---------------------------------------------------------------- checks

nlohmann::json vec_to_json(const Vec& v) {
    auto arr = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

bool LorentzFinslerReport::lipschitz_stable() const {
    if (!lipschitz_finite) return false;
    const double big = std::max(lipschitz, lipschitz_half_step);
    if (big < 1e-12) return true;
    return std::abs(lipschitz - lipschitz_half_step) <= 0.1 * big;
}

nlohmann::json LorentzFinslerReport::to_json() const {
    nlohmann::json j;
    j["max_homogeneity_violation"] = max_homogeneity_violation;
    j["max_concavity_violation"] = max_concavity_violation;
    j["slices_checked"] = slices_checked;
    j["nonconvex_slices"] = nonconvex_slices;
    j["lipschitz"] = lipschitz_finite ? nlohmann::json(lipschitz) : nlohmann::json(nullptr);
    j["lipschitz_half_step"] = lipschitz_finite ? nlohmann::json(lipschitz_half_step) : nlohmann::json(nullptr);
    j["lipschitz_stable"] = lipschitz_stable();
    auto recs = nlohmann::json::array();
    for (const auto& r : records)
        recs.push_back({{"name", r.name}, {"location", {{"t", r.t}, {"p", vec_to_json(r.p)}}}, {"magnitude", r.magnitude}});
    j["violations"] = recs;
    return j;
}

namespace {

struct Fibre {
    double t;
    Vec p;
};

std::vector<Fibre> fibre_grid(const LorentzFinslerRegion& region, int n) {
    const int k = std::max(1, region.fibres_per_axis);
    auto coord = [k](double lo, double hi, int i) { return k == 1 ? lo : lo + (hi - lo) * i / (k - 1); };
    int total = k;
    for (int a = 0; a < n; ++a) total *= k;
    std::vector<Fibre> out;
    out.reserve(total);
    for (int idx = 0; idx < total; ++idx) {
        int rest = idx;
        Fibre f{coord(region.t_lo, region.t_hi, rest % k), Vec(n)};
        rest /= k;
        for (int a = 0; a < n; ++a, rest /= k) f.p[a] = coord(region.p_lo[a], region.p_hi[a], rest % k);
        out.push_back(f);
    }
    return out;
}

struct FibreResult {
    double homogeneity = 0.0;
    double concavity = 0.0;
    bool convex = true;
};

}  // namespace

LorentzFinslerReport check_lorentz_finsler_space(const LorentzFinslerSpace& space, const LorentzFinslerRegion& region) {
    const int n = space.dim();
    if (region.p_lo.size() != n || region.p_hi.size() != n) throw DomainError("check: region dimension mismatch");
    if (!(region.t_lo <= region.t_hi) || !(region.lipschitz_step > 0.0)) throw DomainError("check: malformed region");

    const std::vector<Fibre> fibres = fibre_grid(region, n);
    const std::ptrdiff_t nf = static_cast<std::ptrdiff_t>(fibres.size());
    std::vector<FibreResult> results(nf);

    detail::parallel_for(nf, [&](std::ptrdiff_t i) {
        const Fibre& f = fibres[i];
        // Per-fibre stream so the report does not depend on scheduling.
        std::mt19937_64 rng(region.seed * 1000003ULL + static_cast<unsigned long long>(i));
        std::uniform_real_distribution<double> coord(-2.0, 2.0);
        std::uniform_real_distribution<double> scale(1e-2, 10.0);
        auto draw = [&] {
            SpacetimeVector sv{coord(rng), TangentVector{Vec(n)}};
            for (int a = 0; a < n; ++a) sv.w.c[a] = coord(rng);
            return sv;
        };
        FibreResult& r = results[i];
        for (int s = 0; s < region.homogeneity_samples; ++s) {
            const SpacetimeVector sv = draw();
            const double lambda = scale(rng);
            const SpacetimeVector scaled{lambda * sv.w0, TangentVector{lambda * sv.w.c}};
            const double g = space.G(f.t, f.p, sv);
            const double viol = std::abs(space.G(f.t, f.p, scaled) - lambda * g) / std::max(1.0, lambda);
            r.homogeneity = std::max(r.homogeneity, viol);
        }
        for (int s = 0; s < region.concavity_pairs; ++s) {
            const SpacetimeVector a = draw(), b = draw();
            const SpacetimeVector mid{0.5 * (a.w0 + b.w0), TangentVector{0.5 * (a.w.c + b.w.c)}};
            const double excess = 0.5 * (space.G(f.t, f.p, a) + space.G(f.t, f.p, b)) - space.G(f.t, f.p, mid);
            r.concavity = std::max(r.concavity, excess);
        }
        if (space.has_coballs()) r.convex = is_convex(space.slice(f.t, f.p));
    });

    LorentzFinslerReport report;
    std::ptrdiff_t worst_h = 0, worst_c = 0;
    for (std::ptrdiff_t i = 0; i < nf; ++i) {
        if (results[i].homogeneity > results[worst_h].homogeneity) worst_h = i;
        if (results[i].concavity > results[worst_c].concavity) worst_c = i;
        if (space.has_coballs()) {
            ++report.slices_checked;
            if (!results[i].convex) {
                ++report.nonconvex_slices;
                report.records.push_back({"nonconvex_slice", fibres[i].t, fibres[i].p, 1.0});
            }
        }
    }
    report.max_homogeneity_violation = results[worst_h].homogeneity;
    report.max_concavity_violation = results[worst_c].concavity;
    report.records.push_back({"homogeneity", fibres[worst_h].t, fibres[worst_h].p, report.max_homogeneity_violation});
    report.records.push_back({"concavity", fibres[worst_c].t, fibres[worst_c].p, report.max_concavity_violation});

    if (!space.has_coballs()) {
        report.records.push_back({"lipschitz_unavailable", region.t_lo, region.p_lo, std::numeric_limits<double>::quiet_NaN()});
        return report;
    }

    // C^x slices over (s, t, p); s does not enter the slice but is part of the domain.
    Box box{Vec(n + 2), Vec(n + 2)};
    box.lo[0] = region.s_lo;
    box.hi[0] = region.s_hi;
    box.lo[1] = region.t_lo;
    box.hi[1] = region.t_hi;
    box.lo.tail(n) = region.p_lo;
    box.hi.tail(n) = region.p_hi;
    const int m = region.augmented_directions;
    BodyField field = [&space, n, m](const Vec& x) { return doubled_cone_slice(space.coball(x[1], x.tail(n)), m); };
    LipschitzOptions opts;
    opts.samples_per_axis = region.fibres_per_axis;
    opts.directions = m;
    try {
        report.lipschitz = lipschitz_estimate(field, box, region.lipschitz_step, opts);
        report.lipschitz_half_step = lipschitz_estimate(field, box, 0.5 * region.lipschitz_step, opts);
        report.lipschitz_finite = std::isfinite(report.lipschitz) && std::isfinite(report.lipschitz_half_step);
    } catch (const DomainError&) {
        report.lipschitz_finite = false;
        report.records.push_back({"nonconvex_doubled_slice", region.t_lo, region.p_lo, 1.0});
    }
    report.records.push_back({"lipschitz", region.t_lo, region.p_lo, report.lipschitz});
    return report;
}

}  // namespace conepath

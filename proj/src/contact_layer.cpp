#include "conepath/contact_layer.hpp"

#include "conepath/detail/parallel.hpp"
#include "conepath/directions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace conepath {

ContactSample make_contact_sample(const Generator& gen, double t, const Vec& p, const Vec& v) {
    const int n = gen.dim();
    if (p.size() != n || v.size() != n) throw DomainError("contact sample: dimension mismatch");
    const double h = gen.value(t, p, v);
    if (!(h > 0.0)) throw DomainError("contact sample: generator is not positive at the covector");

    ContactSample s;
    s.t = t;
    s.ray = {p, v / h, Normalization::unit_dual_finsler, t};
    Vec normal(2 * n);
    normal << gen.grad_p(t, p, s.ray.v), gen.grad_v(t, p, s.ray.v);
    // Columns 1.. of a full Q from a QR of the normal span its orthogonal complement.
    Eigen::MatrixXd nm = Eigen::VectorXd(normal);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(nm);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int k = 1; k < 2 * n; ++k) s.basis.push_back(Q.col(k));
    return s;
}

double liouville_pairing(const Vec& v, const Vec& u) {
    const int n = static_cast<int>(v.size());
    if (u.size() != 2 * n) throw DomainError("liouville_pairing: tangent vector must have 2n components");
    return v.dot(u.head(n));
}

double contact_form_eval(const Generator& gen, const ContactSample& sample, const Vec& u) {
    const double h = gen.value(sample.t, sample.ray.p, sample.ray.v);
    if (std::abs(h - 1.0) > 1e-8) throw DomainError("contact_form_eval: representative is off the unit co-sphere");
    return liouville_pairing(sample.ray.v, u);
}

double dalpha(const ContactSample& sample, const Vec& X, const Vec& Y, double eps) {
    const int n = static_cast<int>(sample.ray.v.size());
    // alpha at the point z + e*Z: the fibre part of the point is the covector.
    auto alpha_at = [&](const Vec& Z, double e, const Vec& arg) {
        const Vec v = sample.ray.v + e * Z.tail(n);
        return v.dot(arg.head(n));
    };
    const double xy = (alpha_at(X, eps, Y) - alpha_at(X, -eps, Y)) / (2.0 * eps);
    const double yx = (alpha_at(Y, eps, X) - alpha_at(Y, -eps, X)) / (2.0 * eps);
    return xy - yx;  // constant fields commute
}

Vec path_vector_field(const PositivePath& path, const ContactSample& sample, double delta) {
    const Generator& gen = path.generator();
    const int n = gen.dim();
    const double t = sample.t;
    auto flow_to = [&](double t1) {
        const Trajectory tr = integrate_cogeodesic(gen, sample.ray, t, t1, delta);
        const Vec p = tr.p.back();
        const Vec v = tr.lifted(tr.size() - 1);
        Vec z(2 * n);
        z << p, v / gen.value(t, p, v);  // back onto the time-t co-sphere
        return z;
    };
    return (flow_to(t + delta) - flow_to(t - delta)) / (2.0 * delta);
}

ReebReport verify_reeb_conditions(const ContactSample& sample, const Vec& X) {
    ReebReport r{liouville_pairing(sample.ray.v, X), 0.0};
    for (const Vec& b : sample.basis) r.max_dalpha_contraction = std::max(r.max_dalpha_contraction, std::abs(dalpha(sample, X, b)));
    return r;
}

ReebReport verify_reeb_conditions(const PositivePath& path, const ContactSample& sample) {
    return verify_reeb_conditions(sample, path_vector_field(path, sample));
}

double contact_volume(const ContactSample& sample) {
    const int k = static_cast<int>(sample.basis.size());
    // Bordered matrix [[0, a], [-a^T, W]]; its Pfaffian is alpha ^ (d alpha)^{n-1} on the frame.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i < k; ++i) {
        const double a = liouville_pairing(sample.ray.v, sample.basis[i]);
        M(0, i + 1) = a;
        M(i + 1, 0) = -a;
        for (int j = 0; j < i; ++j) {
            const double w = dalpha(sample, sample.basis[i], sample.basis[j]);
            M(i + 1, j + 1) = w;
            M(j + 1, i + 1) = -w;
        }
    }
    return std::sqrt(std::abs(M.determinant())) / sample.ray.v.norm();
}

double positivity_margin(const PositivePath& path, double t, const RayPoint& ray, double delta) {
    const Generator& gen = path.generator();
    const double step = std::min(path.config().step, delta);
    auto flow_to = [&](double t1) { return integrate_cogeodesic(gen, ray, 0.0, t1, step); };
    const Trajectory plus = flow_to(t + delta);
    const Trajectory minus = flow_to(t - delta);
    const Trajectory here = flow_to(t);
    const Vec pdot = (plus.p.back() - minus.p.back()) / (2.0 * delta);
    Vec v = here.lifted(here.size() - 1);
    switch (ray.normalization) {
        case Normalization::free: break;
        case Normalization::unit_euclidean: v /= v.norm(); break;
        case Normalization::unit_dual_finsler: v /= std::abs(gen.value(t, here.p.back(), v)); break;
    }
    return v.dot(pdot);
}

std::vector<RayPoint> sky(const PositivePath& path, const SpacetimeEvent& event, int m) {
    const int n = path.dim();
    if (m < 1) throw DomainError("sky: need at least one ray");
    const DirectionSet dirs = DirectionSet::standard(n, n == 1 ? 2 : m);
    std::vector<RayPoint> out(dirs.size());
    detail::parallel_for(dirs.size(), [&](std::ptrdiff_t i) {
        const RayPoint r{event.p.coords(), dirs[static_cast<int>(i)], Normalization::unit_euclidean, 0.0};
        out[i] = inverse_path_apply(path, event.t, r);
    });
    return out;
}

double isotopy_margin(const PositivePath& path, const SpacetimeCurve& curve, double s, const Vec& u, double ds) {
    const Generator& gen = path.generator();
    const CurvePoint c = curve(s);
    const double h = gen.value(c.t, c.p, u);
    if (!(std::abs(h) > 0.0)) throw DomainError("isotopy_margin: generator vanishes at the covector");
    const Vec rep = u / std::abs(h);
    // The lifted flow preserves lambda, so pairing at time 0 equals pairing at the curve.
    auto image = [&](double si) {
        const CurvePoint ci = curve(si);
        return inverse_path_apply(path, ci.t, RayPoint{ci.p, rep, Normalization::free, 0.0});
    };
    const RayPoint plus = image(s + ds), minus = image(s - ds), mid = image(s);
    // Chart displacement: the flow images are wrapped on a torus.
    const Vec pdot = path.base().displacement(minus.p, plus.p) / (2.0 * ds);
    return mid.v.dot(pdot);
}

SkyIsotopy sky_isotopy_positivity(const PositivePath& path, const SpacetimeCurve& curve, const std::vector<double>& s,
                                  int m) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) throw DomainError("sky isotopy: curve parameters must be strictly increasing");
    const int n = path.dim();
    const DirectionSet dirs = DirectionSet::standard(n, n == 1 ? 2 : m);

    SkyIsotopy iso;
    iso.s = s;
    iso.skies.resize(s.size());
    iso.margins.assign(s.size(), std::vector<double>(dirs.size()));
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(s.size()) * dirs.size();
    detail::parallel_for(total, [&](std::ptrdiff_t idx) {
        const std::size_t k = static_cast<std::size_t>(idx / dirs.size());
        const int i = static_cast<int>(idx % dirs.size());
        iso.margins[k][i] = isotopy_margin(path, curve, s[k], dirs[i]);
    });
    for (std::size_t k = 0; k < s.size(); ++k) {
        const CurvePoint c = curve(s[k]);
        iso.skies[k] = sky(path, SpacetimeEvent{c.t, BasePoint(c.p)}, m);
    }

    iso.min_margin = std::numeric_limits<double>::infinity();
    iso.max_margin = -std::numeric_limits<double>::infinity();
    for (const auto& row : iso.margins)
        for (double x : row) iso.min_margin = std::min(iso.min_margin, x), iso.max_margin = std::max(iso.max_margin, x);
    if (iso.max_margin < 0.0) iso.verdict = "timelike-consistent";
    else if (iso.max_margin <= 1e-6) iso.verdict = "causal-consistent";
    else iso.verdict = "not causal";
    return iso;
}

nlohmann::json SkyIsotopy::to_json() const {
    return {{"samples", s.size()},
            {"rays_per_sky", margins.empty() ? 0 : margins.front().size()},
            {"min_margin", min_margin},
            {"max_margin", max_margin},
            {"verdict", verdict},
            {"sign_convention", "ST*Sigma side: future timelike curves give negative margins"}};
}

void write_margins_csv(std::ostream& out, const SkyIsotopy& iso) {
    out << "s,ray,margin\n";
    char buf[64];
    for (std::size_t k = 0; k < iso.margins.size(); ++k)
        for (std::size_t i = 0; i < iso.margins[k].size(); ++i) {
            auto res = std::to_chars(buf, buf + sizeof(buf), iso.s[k]);
            out.write(buf, res.ptr - buf);
            out << ',' << i << ',';
            res = std::to_chars(buf, buf + sizeof(buf), iso.margins[k][i]);
            out.write(buf, res.ptr - buf);
            out << '\n';
        }
}

}  // namespace conepath

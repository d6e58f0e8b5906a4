#include "conepath/dynamics.hpp"

#include "conepath/convex_duality.hpp"
#include "conepath/detail/parallel.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

namespace conepath {

RayPoint RayPoint::unit(const Vec& p, const Vec& v) {
    const double len = v.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("ray: covector must be finite and nonzero");
    return {p, v / len, Normalization::unit_euclidean, 0.0};
}

double ray_distance(const BaseManifold& base, const RayPoint& a, const RayPoint& b) {
    return base.displacement(a.p, b.p).norm() + (a.v.normalized() - b.v.normalized()).norm();
}

// ---------------------------------------------------------------- generator

namespace {

// Fourth-order central difference of f along e_k, h = 1e-3.
template <typename F>
Vec fd4_gradient(F&& f, const Vec& x) {
    constexpr double h = 1e-3;
    Vec g(x.size());
    for (int k = 0; k < x.size(); ++k) {
        Vec a = x, b = x, c = x, d = x;
        a[k] += 2 * h, b[k] += h, c[k] -= h, d[k] -= 2 * h;
        g[k] = (-f(a) + 8.0 * f(b) - 8.0 * f(c) + f(d)) / (12.0 * h);
    }
    return g;
}

}  // namespace

struct Generator::Impl {
    int n = 0;
    Fn h;
    GradFn gv, gp;
    std::optional<FinslerFamily> fam;
    bool reversed = false;
    bool invariant = false;
};

Generator Generator::dual_finsler(FinslerFamily fam) {
    auto impl = std::make_shared<Impl>();
    impl->n = fam.dim();
    impl->h = [fam](double t, const Vec& p, const Vec& v) { return fam.at(t, p).dual(v); };
    if (fam.kind() == FinslerKind::custom) {
        // Custom duals are maximizations; the integrator asks for the same
        // (t, p, v) repeatedly when H is invariant, so keep the last answers.
        auto token = std::make_shared<char>();
        impl->gv = [fam, token](double t, const Vec& p, const Vec& v) {
            struct Entry {
                const void* owner = nullptr;
                double t = 0.0;
                Vec p, v, grad;
            };
            constexpr int kSlots = 4;
            thread_local Entry slots[kSlots];
            thread_local int next = 0;
            for (const Entry& e : slots)
                if (e.owner == token.get() && e.t == t && e.p.size() == p.size() && e.p == p && e.v == v) return e.grad;
            Entry& e = slots[next];
            next = (next + 1) % kSlots;
            e = {token.get(), t, p, v, fam.at(t, p).dual_gradient(v)};
            return e.grad;
        };
    } else {
        impl->gv = [fam](double t, const Vec& p, const Vec& v) { return fam.at(t, p).dual_gradient(v); };
    }
    impl->gp = [fam](double t, const Vec& p, const Vec& v) {
        return fd4_gradient([&](const Vec& q) { return fam.at(t, q).dual(v); }, p);
    };
    impl->invariant = fam.kind() == FinslerKind::euclidean;
    impl->fam = std::move(fam);
    return Generator(std::move(impl));
}

Generator Generator::hamiltonian(int n, Fn h, GradFn grad_v, GradFn grad_p) {
    if (!h) throw DomainError("hamiltonian: empty generator");
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->h = h;
    impl->gv = grad_v ? std::move(grad_v) : GradFn([h](double t, const Vec& p, const Vec& v) {
        // 0-homogeneous, so differentiate at the unit representative.
        const double len = v.norm();
        return Vec(fd4_gradient([&](const Vec& u) { return h(t, p, u); }, Vec(v / len)));
    });
    impl->gp = grad_p ? std::move(grad_p) : GradFn([h](double t, const Vec& p, const Vec& v) {
        return Vec(fd4_gradient([&](const Vec& q) { return h(t, q, v); }, p));
    });
    return Generator(std::move(impl));
}

int Generator::dim() const { return impl_->n; }

// Invariant generators are evaluated at one reference fibre (t = 0, p = 0).
double Generator::value(double t, const Vec& p, const Vec& v) const {
    if (impl_->invariant) return impl_->reversed ? -impl_->h(0.0, Vec::Zero(impl_->n), v) : impl_->h(0.0, Vec::Zero(impl_->n), v);
    return impl_->reversed ? -impl_->h(-t, p, v) : impl_->h(t, p, v);
}

Vec Generator::grad_v(double t, const Vec& p, const Vec& v) const {
    if (impl_->invariant) {
        const Vec g = impl_->gv(0.0, Vec::Zero(impl_->n), v);
        return impl_->reversed ? Vec(-g) : g;
    }
    return impl_->reversed ? Vec(-impl_->gv(-t, p, v)) : impl_->gv(t, p, v);
}

Vec Generator::grad_p(double t, const Vec& p, const Vec& v) const {
    if (impl_->invariant) return Vec::Zero(impl_->n);
    return impl_->reversed ? Vec(-impl_->gp(-t, p, v)) : impl_->gp(t, p, v);
}

Generator Generator::reversed() const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->reversed = !impl_->reversed;
    return Generator(std::move(impl));
}

bool Generator::is_reversed() const { return impl_->reversed; }

const FinslerFamily* Generator::finsler() const {
    return impl_->fam && !impl_->reversed ? &*impl_->fam : nullptr;
}

Generator Generator::with_invariant(bool invariant) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->invariant = invariant;
    return Generator(std::move(impl));
}

bool Generator::invariant() const { return impl_->invariant; }

// ---------------------------------------------------------------- path

PositivePath::PositivePath(BaseManifold base, Generator gen, IntegratorConfig cfg)
    : base_(std::move(base)), gen_(std::move(gen)), cfg_(cfg) {
    if (base_.dim() != gen_.dim()) throw DomainError("positive path: base and generator dimensions differ");
    if (!(cfg_.step > 0.0) || !(cfg_.horizon > 0.0)) throw DomainError("positive path: step and horizon must be positive");
}

PositivePath PositivePath::from_finsler(BaseManifold base, FinslerFamily fam, IntegratorConfig cfg) {
    return PositivePath(std::move(base), Generator::dual_finsler(std::move(fam)), cfg);
}

PositivePath PositivePath::from_hamiltonian(BaseManifold base, Generator gen, IntegratorConfig cfg) {
    return PositivePath(std::move(base), std::move(gen), cfg);
}

PositivePath PositivePath::with_config(IntegratorConfig cfg) const { return PositivePath(base_, gen_, cfg); }

PositivePath PositivePath::reversed() const { return PositivePath(base_, gen_.reversed(), cfg_); }

// ---------------------------------------------------------------- integration

namespace {

int step_count(double span, double step) {
    if (!(step > 0.0)) throw DomainError("integration step must be positive");
    return std::max(1, static_cast<int>(std::ceil(std::abs(span) / step - 1e-9)));
}

void check_state(double t, const Vec& p, const Vec& v, const Vec& last_p, const Vec& last_v) {
    const double len = v.norm();
    if (!p.allFinite() || !std::isfinite(len) || len < 1e-8 || len > 1e8)
        throw IntegrationError("cogeodesic flow blew up", t, last_p, last_v);
}

}  // namespace

Trajectory integrate_cogeodesic(const Generator& gen, const RayPoint& ray, double t0, double t1, double step) {
    const int n = gen.dim();
    if (ray.p.size() != n || ray.v.size() != n) throw DomainError("integrate_cogeodesic: dimension mismatch");
    if (!(ray.v.norm() > 0.0)) throw DomainError("integrate_cogeodesic: zero covector");

    Trajectory out;
    out.t.push_back(t0);
    out.p.push_back(ray.p);
    out.v.push_back(ray.v);
    out.log_scale.push_back(0.0);
    if (t1 == t0) return out;

    const int steps = step_count(t1 - t0, step);
    const double h = (t1 - t0) / steps;
    out.t.reserve(steps + 1);
    out.p.reserve(steps + 1);
    out.v.reserve(steps + 1);
    out.log_scale.reserve(steps + 1);

    Vec p = ray.p, v = ray.v;
    double log_scale = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        const Vec kp1 = gen.grad_v(t, p, v), kv1 = -gen.grad_p(t, p, v);
        const Vec p2 = p + 0.5 * h * kp1, v2 = v + 0.5 * h * kv1;
        const Vec kp2 = gen.grad_v(t + 0.5 * h, p2, v2), kv2 = -gen.grad_p(t + 0.5 * h, p2, v2);
        const Vec p3 = p + 0.5 * h * kp2, v3 = v + 0.5 * h * kv2;
        const Vec kp3 = gen.grad_v(t + 0.5 * h, p3, v3), kv3 = -gen.grad_p(t + 0.5 * h, p3, v3);
        const Vec p4 = p + h * kp3, v4 = v + h * kv3;
        const Vec kp4 = gen.grad_v(t + h, p4, v4), kv4 = -gen.grad_p(t + h, p4, v4);

        const Vec pn = p + (h / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
        const Vec vn = v + (h / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        const double tn = (i + 1 == steps) ? t1 : t0 + (i + 1) * h;
        check_state(tn, pn, vn, p, std::exp(log_scale) * v);

        // 1-homogeneity: rescaling the representative commutes with the flow.
        const double len = vn.norm();
        p = pn;
        v = vn / len;
        log_scale += std::log(len);
        out.t.push_back(tn);
        out.p.push_back(p);
        out.v.push_back(v);
        out.log_scale.push_back(log_scale);
    }
    return out;
}

Trajectory integrate_cogeodesic(const FinslerFamily& fam, const RayPoint& ray, double t0, double t1, double step) {
    return integrate_cogeodesic(Generator::dual_finsler(fam), ray, t0, t1, step);
}

namespace {

void check_horizon(const PositivePath& path, double t) {
    if (!(std::abs(t) <= path.config().horizon)) throw DomainError("time outside the configured horizon");
}

RayPoint flow_between(const PositivePath& path, const RayPoint& ray, double from, double to) {
    if (from == to) return ray;
    const Trajectory tr = integrate_cogeodesic(path.generator(), ray, from, to, path.config().step);
    return {path.base().wrap(tr.p.back()), tr.lifted(tr.size() - 1), Normalization::free, 0.0};
}

}  // namespace

RayPoint path_apply(const PositivePath& path, double t, const RayPoint& ray) {
    check_horizon(path, t);
    return flow_between(path, ray, 0.0, t);
}

RayPoint inverse_path_apply(const PositivePath& path, double t, const RayPoint& ray) {
    check_horizon(path, t);
    return flow_between(path, ray, t, 0.0);
}

std::vector<RayPoint> path_apply_batch(const PositivePath& path, double t, const std::vector<RayPoint>& rays) {
    std::vector<RayPoint> out(rays.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(rays.size()), [&](std::ptrdiff_t i) { out[i] = path_apply(path, t, rays[i]); });
    return out;
}

std::vector<RayPoint> path_apply_batch_serial(const PositivePath& path, double t, const std::vector<RayPoint>& rays) {
    std::vector<RayPoint> out;
    out.reserve(rays.size());
    for (const RayPoint& r : rays) out.push_back(path_apply(path, t, r));
    return out;
}

// ---------------------------------------------------------------- Lagrangian side

namespace {

// 4th-order directional difference of f at x along d.
template <typename F>
auto fd4_directional(F&& f, double h) {
    return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
}

struct SprayState {
    Vec p;
    double y0;
    Vec y;
};

// d/dt of (p, y0, y) for the spray of L = y0^2 - F_t(p, y)^2, reparametrized by t.
SprayState spray_rhs(const FinslerFamily& fam, double t, const SprayState& s) {
    const int n = static_cast<int>(s.p.size());
    constexpr double h = 1e-3;
    auto F2 = [&](double tt, const Vec& q) {
        const double f = fam.at(tt, q).norm(s.y);
        return f * f;
    };
    const double dt_F2 = fd4_directional([&](double e) { return F2(t + e, s.p); }, h);
    Vec dp_F2(n);
    for (int k = 0; k < n; ++k)
        dp_F2[k] = fd4_directional([&](double e) {
            Vec q = s.p;
            q[k] += e;
            return F2(t, q);
        }, h);
    // D_y legendre: derivative of the Legendre map along the flow direction (y0, y) in x.
    const double ylen = std::sqrt(s.y0 * s.y0 + s.y.squaredNorm());
    const double hd = h / std::max(1.0, ylen);
    Vec dleg(n);
    {
        auto leg = [&](double e) { return fam.at(t + e * s.y0, s.p + e * s.y).legendre(s.y); };
        dleg = (-leg(2 * hd) + 8.0 * leg(hd) - 8.0 * leg(-hd) + leg(-2 * hd)) / (12.0 * hd);
    }
    const Mat g = fam.at(t, s.p).fundamental_tensor(s.y);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw IntegrationError("degenerate fundamental tensor", t, s.p, s.y);

    const double s0 = -0.5 * dt_F2;
    const Vec sy = llt.solve(Vec(0.5 * dp_F2 - dleg));
    return {s.y / s.y0, s0 / s.y0, sy / s.y0};
}

SprayState axpy(const SprayState& a, double h, const SprayState& k) {
    return {a.p + h * k.p, a.y0 + h * k.y0, a.y + h * k.y};
}

}  // namespace

SpacetimeTrajectory lagrangian_geodesic(const FinslerFamily& fam, const SpacetimeEvent& event, const SpacetimeVector& sv,
                                        double t1, double step) {
    const Vec& p0 = event.p.coords();
    const Vec& w = sv.w.c;
    if (p0.size() != fam.dim() || w.size() != fam.dim()) throw DomainError("lagrangian_geodesic: dimension mismatch");
    const double f0 = fam.at(event.t, p0).norm(w);
    const double scale = std::sqrt(sv.w0 * sv.w0 + w.squaredNorm());
    if (!(sv.w0 > 0.0) || std::abs(sv.w0 - f0) > 1e-6 * scale)
        throw DomainError("lagrangian_geodesic: initial vector is not future-null");

    SpacetimeTrajectory out;
    SprayState s{p0, sv.w0, w};
    auto record = [&](double t) {
        out.t.push_back(t);
        out.p.push_back(s.p);
        out.w.push_back(s.y / s.y0);
        out.null_residual.push_back(fam.at(t, s.p).norm(s.y) / s.y0 - 1.0);
    };
    record(event.t);
    if (t1 == event.t) return out;

    const int steps = step_count(t1 - event.t, step);
    const double h = (t1 - event.t) / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = event.t + i * h;
        const SprayState k1 = spray_rhs(fam, t, s);
        const SprayState k2 = spray_rhs(fam, t + 0.5 * h, axpy(s, 0.5 * h, k1));
        const SprayState k3 = spray_rhs(fam, t + 0.5 * h, axpy(s, 0.5 * h, k2));
        const SprayState k4 = spray_rhs(fam, t + h, axpy(s, h, k3));
        s.p += (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
        s.y0 += (h / 6.0) * (k1.y0 + 2.0 * k2.y0 + 2.0 * k3.y0 + k4.y0);
        s.y += (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        if (!s.p.allFinite() || !(s.y0 > 0.0) || !s.y.allFinite())
            throw IntegrationError("geodesic spray blew up", t + h, s.p, s.y);
        record((i + 1 == steps) ? t1 : event.t + (i + 1) * h);
    }
    return out;
}

// ---------------------------------------------------------------- cone geodesics

namespace {

// F_t(w) - 1 for Finsler generators; otherwise h_K(w) - 1 with K = {H_t <= 1},
// the null condition of the cone whose slice is the polar of K.
double null_residual(const Generator& gen, double t, const Vec& p, const Vec& w) {
    if (const FinslerFamily* fam = gen.finsler()) return fam->at(t, p).norm(w) - 1.0;
    const int n = gen.dim();
    if (gen.value(t, p, Vec::Ones(n)) <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const StarBody K = StarBody::closed_form(n, [&](const Vec& u) { return 1.0 / gen.value(t, p, u); }, 512);
    return support_function(K, w) - 1.0;
}

}  // namespace

SpacetimeTrajectory cone_geodesic(const PositivePath& path, const RayPoint& ray, double t_min, double t_max) {
    if (!(t_min <= t_max)) throw DomainError("cone_geodesic: empty interval");
    check_horizon(path, t_min);
    check_horizon(path, t_max);
    const Generator& gen = path.generator();
    const double step = path.config().step;

    // Integrate from 0 outwards in both directions so every sample is phi_t(ray).
    std::vector<std::pair<double, std::pair<Vec, Vec>>> samples;
    if (t_min < 0.0) {
        const Trajectory back = integrate_cogeodesic(gen, ray, 0.0, t_min, step);
        for (std::size_t i = back.size(); i-- > 1;) samples.push_back({back.t[i], {back.p[i], back.v[i]}});
    }
    const Trajectory fwd = integrate_cogeodesic(gen, ray, 0.0, std::max(t_max, 0.0), step);
    for (std::size_t i = 0; i < fwd.size(); ++i) samples.push_back({fwd.t[i], {fwd.p[i], fwd.v[i]}});

    SpacetimeTrajectory out;
    const bool invariant = gen.invariant() && !gen.finsler();
    std::optional<StarBody> cached;  // K is the same body everywhere for invariant generators
    for (const auto& [t, pv] : samples) {
        if (t < t_min - 1e-12 || t > t_max + 1e-12) continue;
        const Vec w = gen.grad_v(t, pv.first, pv.second);
        out.t.push_back(t);
        out.p.push_back(pv.first);
        out.w.push_back(w);
        if (invariant) {
            if (!cached) {
                const Vec p0 = pv.first;
                cached = StarBody::closed_form(gen.dim(), [gen, p0](const Vec& u) { return 1.0 / gen.value(0.0, p0, u); }, 512);
            }
            out.null_residual.push_back(support_function(*cached, w) - 1.0);
        } else {
            out.null_residual.push_back(null_residual(gen, t, pv.first, w));
        }
    }
    return out;
}

// ---------------------------------------------------------------- CSV

namespace {

void put(std::ostream& out, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Generator& gen, const Trajectory& traj) {
    const int n = gen.dim();
    out << 't';
    for (int k = 0; k < n; ++k) out << ",p" << (k + 1);
    for (int k = 0; k < n; ++k) out << ",v" << (k + 1);
    out << ",H_residual\n";
    if (traj.size() == 0) return;
    const double h0 = gen.value(traj.t[0], traj.p[0], traj.lifted(0));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        put(out, traj.t[i]);
        for (int k = 0; k < n; ++k) out << ',', put(out, traj.p[i][k]);
        for (int k = 0; k < n; ++k) out << ',', put(out, traj.v[i][k]);
        out << ',';
        put(out, gen.value(traj.t[i], traj.p[i], traj.lifted(i)) - h0);
        out << '\n';
    }
}

}  // namespace conepath

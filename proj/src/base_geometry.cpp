#include "conepath/base_geometry.hpp"

#include "conepath/detail/refine.hpp"
#include "conepath/directions.hpp"

#include <cmath>
#include <limits>

namespace conepath {

// ---------------------------------------------------------------- manifold

BaseManifold::BaseManifold(int dim, Topology topology, Vec periods)
    : dim_(dim), topology_(topology), periods_(std::move(periods)) {
    if (dim < 1 || dim > 3) throw DomainError("base manifold dimension must be 1, 2 or 3");
}

BaseManifold BaseManifold::euclidean(int dim) { return BaseManifold(dim, Topology::euclidean, Vec::Zero(dim)); }

BaseManifold BaseManifold::torus(int dim, double period) {
    return torus(Vec::Constant(dim, period));
}

BaseManifold BaseManifold::torus(const Vec& periods) {
    for (int i = 0; i < periods.size(); ++i)
        if (!(periods[i] > 0.0) || !std::isfinite(periods[i])) throw DomainError("torus periods must be positive");
    return BaseManifold(static_cast<int>(periods.size()), Topology::torus, periods);
}

Vec BaseManifold::wrap(const Vec& coords) const {
    if (coords.size() != dim_) throw DomainError("coordinate dimension mismatch");
    if (topology_ == Topology::euclidean) return coords;
    Vec out = coords;
    for (int i = 0; i < dim_; ++i) {
        out[i] = std::fmod(coords[i], periods_[i]);
        if (out[i] < 0.0) out[i] += periods_[i];
        if (out[i] >= periods_[i]) out[i] = 0.0;
    }
    return out;
}

Vec BaseManifold::displacement(const Vec& a, const Vec& b) const {
    Vec d = b - a;
    if (topology_ == Topology::torus)
        for (int i = 0; i < dim_; ++i) d[i] -= periods_[i] * std::round(d[i] / periods_[i]);
    return d;
}

BasePoint::BasePoint(const BaseManifold& manifold, const Vec& coords) : coords_(manifold.wrap(coords)) {}

// ---------------------------------------------------------------- local norm

namespace {

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& w) {
    const double h = 1e-6 * std::max(1.0, w.norm());
    Vec g(w.size());
    for (int i = 0; i < w.size(); ++i) {
        Vec plus = w, minus = w;
        plus[i] += h;
        minus[i] -= h;
        g[i] = (f(plus) - f(minus)) / (2.0 * h);
    }
    return g;
}

}  // namespace

Mat fd_half_hessian_of_square(const std::function<double(const Vec&)>& f, const Vec& w) {
    const int n = static_cast<int>(w.size());
    const double h = 1e-4 * std::max(1.0, w.norm());
    auto sq = [&](const Vec& x) {
        const double v = f(x);
        return 0.5 * v * v;
    };
    const double f0 = sq(w);
    Mat g(n, n);
    for (int i = 0; i < n; ++i) {
        Vec plus = w, minus = w;
        plus[i] += h;
        minus[i] -= h;
        g(i, i) = (sq(plus) - 2.0 * f0 + sq(minus)) / (h * h);
        for (int j = 0; j < i; ++j) {
            Vec pp = w, pm = w, mp = w, mm = w;
            pp[i] += h, pp[j] += h;
            pm[i] += h, pm[j] -= h;
            mp[i] -= h, mp[j] += h;
            mm[i] -= h, mm[j] -= h;
            g(i, j) = (sq(pp) - sq(pm) - sq(mp) + sq(mm)) / (4.0 * h * h);
            g(j, i) = g(i, j);
        }
    }
    return g;
}

double LocalNorm::norm(const Vec& w) const {
    switch (kind_) {
    case FinslerKind::euclidean: return w.norm();
    case FinslerKind::riemannian: return std::sqrt(std::max(0.0, w.dot(a_ * w)));
    case FinslerKind::randers: return std::sqrt(std::max(0.0, w.dot(a_ * w))) + b_.dot(w);
    case FinslerKind::custom:
        if (w.isZero(0.0)) return 0.0;
        return (*custom_)(t_, p_, w);
    }
    return 0.0;
}

Vec LocalNorm::gradient(const Vec& w) const {
    switch (kind_) {
    case FinslerKind::euclidean: return w / w.norm();
    case FinslerKind::riemannian: {
        const Vec aw = a_ * w;
        return aw / std::sqrt(w.dot(aw));
    }
    case FinslerKind::randers: {
        const Vec aw = a_ * w;
        return aw / std::sqrt(w.dot(aw)) + b_;
    }
    case FinslerKind::custom: return fd_gradient([this](const Vec& x) { return norm(x); }, w);
    }
    return w;
}

Mat LocalNorm::fundamental_tensor(const Vec& w) const {
    switch (kind_) {
    case FinslerKind::euclidean: return Mat::Identity(n_, n_);
    case FinslerKind::riemannian: return a_;
    case FinslerKind::randers: {
        // g = (F/alpha) (A - l l^T) + dF dF^T with l = A w / alpha.
        const Vec aw = a_ * w;
        const double alpha = std::sqrt(w.dot(aw));
        const Vec l = aw / alpha;
        const Vec dF = l + b_;
        const double F = alpha + b_.dot(w);
        Mat g = (F / alpha) * (a_ - l * l.transpose()) + dF * dF.transpose();
        return 0.5 * (g + g.transpose());
    }
    case FinslerKind::custom: return fd_half_hessian_of_square([this](const Vec& x) { return norm(x); }, w);
    }
    return Mat::Identity(n_, n_);
}

Vec LocalNorm::legendre(const Vec& w) const { return norm(w) * gradient(w); }

double LocalNorm::dual(const Vec& v) const {
    switch (kind_) {
    case FinslerKind::euclidean: return v.norm();
    case FinslerKind::riemannian: return std::sqrt(std::max(0.0, v.dot(a_inv_ * v)));
    case FinslerKind::randers: {
        const double q = v.dot(a_inv_ * v);
        const double s = v.dot(a_inv_ * b_);
        return (std::sqrt(lambda_ * q + s * s) - s) / lambda_;
    }
    case FinslerKind::custom:
        if (custom_dual_) return v.isZero(0.0) ? 0.0 : (*custom_dual_)(t_, p_, v);
        return custom_dual(v).value;
    }
    return 0.0;
}

Vec LocalNorm::dual_gradient(const Vec& v) const {
    switch (kind_) {
    case FinslerKind::euclidean: return v / v.norm();
    case FinslerKind::riemannian: {
        const Vec av = a_inv_ * v;
        return av / std::sqrt(v.dot(av));
    }
    case FinslerKind::randers: {
        const Vec av = a_inv_ * v;
        const Vec ab = a_inv_ * b_;
        const double q = v.dot(av);
        const double s = v.dot(ab);
        const double root = std::sqrt(lambda_ * q + s * s);
        return ((lambda_ * av + s * ab) / root - ab) / lambda_;
    }
    case FinslerKind::custom:
        if (custom_dual_) return fd_gradient([this](const Vec& x) { return dual(x); }, v);
        return custom_dual(v).argmax;
    }
    return v;
}

LocalNorm::DualMax LocalNorm::custom_dual(const Vec& v) const {
    auto objective = [&](const Vec& u) { return v.dot(u) / norm(u); };
    if (n_ == 1) {
        Vec plus(1), minus(1);
        plus[0] = 1.0;
        minus[0] = -1.0;
        const double a = objective(plus), b = objective(minus);
        return a >= b ? DualMax{a, plus / norm(plus)} : DualMax{b, minus / norm(minus)};
    }
    const DirectionSet dirs = DirectionSet::standard(n_, 512);
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dirs.size(); ++i) {
        const double val = objective(dirs[i]);
        if (val > best_value) best_value = val, best = i;
    }
    const auto refined = detail::maximize_on_sphere(objective, dirs[best], 1.5 * dirs.angular_spacing());
    // Brent resolves the angle to ~2^-30; at a kink maximum (corners of the dual
    // ball) that costs O(1e-8) in value, so only a larger shortfall is a failure.
    if (!refined.converged || refined.value < best_value - 1e-6 * std::abs(best_value))
        throw NumericalError("dual norm refinement did not converge", best_value - refined.value);
    const Vec u = refined.value >= best_value ? refined.x : dirs[best];
    const double value = std::max(refined.value, best_value);
    return {value, u / norm(u)};
}

// ---------------------------------------------------------------- families

namespace {

void check_spd(const Mat& a, const char* what) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0 || !a.allFinite())
        throw DomainError(std::string(what) + ": coefficient matrix is not positive definite");
}

template <typename Fn>
void for_each_sample(int n, const AdmissibilityRegion& region, Fn&& fn) {
    const int k = std::max(2, region.samples_per_axis);
    auto lerp = [k](double lo, double hi, int i) { return lo + (hi - lo) * i / (k - 1); };
    int total = 1;
    for (int i = 0; i < n; ++i) total *= k;
    for (int ti = 0; ti < k; ++ti) {
        const double t = lerp(region.t_lo, region.t_hi, ti);
        for (int idx = 0; idx < total; ++idx) {
            Vec p(n);
            int rem = idx;
            for (int d = 0; d < n; ++d) {
                p[d] = lerp(region.p_lo, region.p_hi, rem % k);
                rem /= k;
            }
            fn(t, p);
        }
    }
}

}  // namespace

FinslerFamily FinslerFamily::euclidean(int n) {
    if (n < 1 || n > 4) throw DomainError("metric dimension must be in 1..4");
    FinslerFamily f;
    f.n_ = n;
    f.kind_ = FinslerKind::euclidean;
    return f;
}

FinslerFamily FinslerFamily::riemannian(int n, MatrixField a, const AdmissibilityRegion& region) {
    FinslerFamily f = euclidean(n);
    f.kind_ = FinslerKind::riemannian;
    f.a_ = std::make_shared<const MatrixField>(std::move(a));
    for_each_sample(n, region, [&](double t, const Vec& p) { check_spd((*f.a_)(t, p), "riemannian metric"); });
    return f;
}

FinslerFamily FinslerFamily::randers(int n, MatrixField a, OneFormField b, const AdmissibilityRegion& region) {
    FinslerFamily f = euclidean(n);
    f.kind_ = FinslerKind::randers;
    f.a_ = std::make_shared<const MatrixField>(std::move(a));
    f.b_ = std::make_shared<const OneFormField>(std::move(b));
    for_each_sample(n, region, [&](double t, const Vec& p) {
        const Mat am = (*f.a_)(t, p);
        check_spd(am, "randers metric");
        const Vec bv = (*f.b_)(t, p);
        const double norm2 = bv.dot(am.llt().solve(bv));
        if (!(norm2 < 1.0))
            throw DomainError("randers admissibility violated: |b|_A = " + std::to_string(std::sqrt(norm2)) +
                              " >= 1 at t = " + std::to_string(t));
    });
    return f;
}

FinslerFamily FinslerFamily::custom(int n, NormField fn) {
    FinslerFamily f = euclidean(n);
    f.kind_ = FinslerKind::custom;
    f.custom_ = std::make_shared<const NormField>(std::move(fn));
    return f;
}

FinslerFamily FinslerFamily::custom(int n, NormField fn, NormField dual) {
    FinslerFamily f = custom(n, std::move(fn));
    f.custom_dual_ = std::make_shared<const NormField>(std::move(dual));
    return f;
}

LocalNorm FinslerFamily::at(double t, const Vec& p) const {
    LocalNorm local;
    local.n_ = n_;
    local.kind_ = kind_;
    local.t_ = t;
    local.p_ = p;
    switch (kind_) {
    case FinslerKind::euclidean: break;
    case FinslerKind::riemannian:
        local.a_ = (*a_)(t, p);
        local.a_inv_ = local.a_.inverse();
        break;
    case FinslerKind::randers:
        local.a_ = (*a_)(t, p);
        local.a_inv_ = local.a_.inverse();
        local.b_ = (*b_)(t, p);
        local.lambda_ = 1.0 - local.b_.dot(local.a_inv_ * local.b_);
        if (!(local.lambda_ > 0.0)) throw DomainError("randers admissibility violated at evaluation point");
        break;
    case FinslerKind::custom:
        local.custom_ = custom_;
        local.custom_dual_ = custom_dual_;
        break;
    }
    return local;
}

// ---------------------------------------------------------------- operations

namespace {

void require_nonzero(const Vec& w, const char* what) {
    if (w.size() == 0 || w.isZero(0.0)) throw DomainError(std::string(what) + ": zero vector");
    if (!w.allFinite()) throw DomainError(std::string(what) + ": non-finite components");
}

}  // namespace

double eval_F(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w) {
    require_nonzero(w.c, "eval_F");
    return fam.at(t, p.coords()).norm(w.c);
}

FundamentalTensor fundamental_tensor(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w) {
    require_nonzero(w.c, "fundamental_tensor");
    const Mat g = fam.at(t, p.coords()).fundamental_tensor(w.c);
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    return {g, es.eigenvalues().minCoeff() > 0.0};
}

Covector legendre(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w) {
    require_nonzero(w.c, "legendre");
    return {fam.at(t, p.coords()).legendre(w.c)};
}

double dual_norm(const FinslerFamily& fam, double t, const BasePoint& p, const Covector& v) {
    require_nonzero(v.c, "dual_norm");
    return fam.at(t, p.coords()).dual(v.c);
}

double energy(const FinslerFamily& fam, const SampledCurve& curve) {
    const std::size_t m = curve.size();
    if (m < 2 || curve.t.size() != m || curve.p.size() != m) throw DomainError("energy: need at least 2 samples");
    for (std::size_t i = 1; i < m; ++i)
        if (!(curve.param[i] > curve.param[i - 1])) throw DomainError("energy: parameter must increase strictly");

    // Second-order differences on a possibly non-uniform grid.
    auto derivative = [&](std::size_t i, auto&& get) {
        const auto& s = curve.param;
        if (m == 2) return (get(1) - get(0)) / (s[1] - s[0]);
        if (i == 0) {
            const double h1 = s[1] - s[0], h2 = s[2] - s[1];
            return -(2 * h1 + h2) / (h1 * (h1 + h2)) * get(0) + (h1 + h2) / (h1 * h2) * get(1) -
                   h1 / (h2 * (h1 + h2)) * get(2);
        }
        if (i == m - 1) {
            const double h1 = s[m - 2] - s[m - 3], h2 = s[m - 1] - s[m - 2];
            return h2 / (h1 * (h1 + h2)) * get(m - 3) - (h1 + h2) / (h1 * h2) * get(m - 2) +
                   (2 * h2 + h1) / (h2 * (h1 + h2)) * get(m - 1);
        }
        const double h1 = s[i] - s[i - 1], h2 = s[i + 1] - s[i];
        return -h2 / (h1 * (h1 + h2)) * get(i - 1) + (h2 - h1) / (h1 * h2) * get(i) + h1 / (h2 * (h1 + h2)) * get(i + 1);
    };

    std::vector<double> lagrangian(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double w0 = derivative(i, [&](std::size_t k) { return curve.t[k]; });
        Vec w(curve.p[i].size());
        for (int d = 0; d < w.size(); ++d) w[d] = derivative(i, [&](std::size_t k) { return curve.p[k][d]; });
        const double F = fam.at(curve.t[i], curve.p[i]).norm(w);
        lagrangian[i] = w0 * w0 - F * F;
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < m; ++i)
        integral += 0.5 * (lagrangian[i] + lagrangian[i - 1]) * (curve.param[i] - curve.param[i - 1]);
    return 0.5 * integral;
}

}  // namespace conepath

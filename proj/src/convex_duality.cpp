#include "conepath/convex_duality.hpp"

#include "conepath/detail/parallel.hpp"
#include "conepath/detail/refine.hpp"
#include "conepath/kernels.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace conepath {

namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

// Padding keeps the spline's free end conditions far from [0, 2pi); their
// influence decays like 0.27^k, so 32 samples put it below roundoff.
constexpr int kSplinePad = 32;

std::shared_ptr<const Spline> make_periodic_spline(const std::vector<double>& radii) {
    const int m = static_cast<int>(radii.size());
    std::vector<double> ext(m + 2 * kSplinePad);
    for (int i = 0; i < static_cast<int>(ext.size()); ++i) ext[i] = radii[((i - kSplinePad) % m + m) % m];
    const double h = 2.0 * std::numbers::pi / m;
    return std::make_shared<const Spline>(ext.begin(), ext.end(), -kSplinePad * h, h);
}

}  // namespace

struct StarBody::Impl {
    int n = 0;
    DirectionSet dirs;
    std::vector<double> radii;
    RadialFn exact;
    SupportFn support;
    std::shared_ptr<const Spline> spline;
    mutable std::atomic<int> convex_cache{-1};

    Impl(DirectionSet d, std::vector<double> r) : n(d.dim()), dirs(std::move(d)), radii(std::move(r)) {}

    double radial(const Vec& u) const {
        if (exact) return exact(u);
        if (n == 1) return u[0] > 0.0 ? radii[0] : radii[1];
        if (n == 2) {
            double th = std::atan2(u[1], u[0]);
            if (th < 0.0) th += 2.0 * std::numbers::pi;
            return std::max((*spline)(th), 1e-300);
        }
        return idw(u);
    }

    double idw(const Vec& u) const {
        // Inverse-distance weighting over the 2n nearest samples.
        const int k = std::min(2 * n, dirs.size());
        std::vector<std::pair<double, int>> near;
        near.reserve(k + 1);
        for (int i = 0; i < dirs.size(); ++i) {
            const double d = 1.0 - u.dot(dirs[i]);
            if (d < 1e-15) return radii[i];
            if (static_cast<int>(near.size()) < k || d < near.back().first) {
                near.emplace_back(d, i);
                std::sort(near.begin(), near.end());
                if (static_cast<int>(near.size()) > k) near.pop_back();
            }
        }
        double wsum = 0.0, acc = 0.0;
        for (const auto& [d, i] : near) {
            const double w = 1.0 / (d * d);
            wsum += w;
            acc += w * radii[i];
        }
        return acc / wsum;
    }
};

namespace {

void check_radii(const std::vector<double>& radii) {
    for (double r : radii)
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("star body radii must be finite and strictly positive");
}

}  // namespace

StarBody StarBody::from_samples(const DirectionSet& dirs, std::vector<double> radii) {
    if (static_cast<int>(radii.size()) != dirs.size()) throw DomainError("radii/direction count mismatch");
    check_radii(radii);
    auto impl = std::make_shared<Impl>(dirs, std::move(radii));
    if (impl->n == 2) impl->spline = make_periodic_spline(impl->radii);
    return StarBody(std::move(impl));
}

StarBody StarBody::closed_form(int n, RadialFn radial, int m) {
    const DirectionSet dirs = DirectionSet::standard(n, m > 0 ? m : DirectionSet::default_count(n));
    std::vector<double> radii = kernels::radial_batch(radial, dirs);
    check_radii(radii);
    auto impl = std::make_shared<Impl>(dirs, std::move(radii));
    impl->exact = std::move(radial);
    return StarBody(std::move(impl));
}

StarBody StarBody::with_support(SupportFn support) const {
    auto impl = std::make_shared<Impl>(impl_->dirs, impl_->radii);
    impl->exact = impl_->exact;
    impl->spline = impl_->spline;
    impl->support = std::move(support);
    return StarBody(std::move(impl));
}

int StarBody::dim() const { return impl_->n; }
const DirectionSet& StarBody::directions() const { return impl_->dirs; }
const std::vector<double>& StarBody::radii() const { return impl_->radii; }
bool StarBody::is_closed_form() const { return static_cast<bool>(impl_->exact); }
bool StarBody::has_exact_support() const { return static_cast<bool>(impl_->support); }
double StarBody::radial(const Vec& unit) const { return impl_->radial(unit); }

bool StarBody::contains(const Vec& x, double tol) const {
    const double len = x.norm();
    if (len == 0.0) return true;
    return len <= radial(x / len) * (1.0 + tol) + tol;
}

Vec StarBody::boundary_point(int i) const { return impl_->radii[i] * impl_->dirs[i]; }

StarBody StarBody::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw DomainError("star bodies scale by positive factors only");
    std::vector<double> radii = impl_->radii;
    for (double& r : radii) r *= lambda;
    auto impl = std::make_shared<Impl>(impl_->dirs, std::move(radii));
    if (impl_->exact) {
        impl->exact = [base = impl_, lambda](const Vec& u) { return lambda * base->radial(u); };
    } else if (impl->n == 2) {
        impl->spline = make_periodic_spline(impl->radii);
    }
    if (impl_->support) impl->support = [base = impl_, lambda](const Vec& w) { return lambda * base->support(w); };
    return StarBody(std::move(impl));
}

// ---------------------------------------------------------------- support / polar

double support_function(const StarBody& body, const Vec& w) {
    const auto& impl = *body.impl_;
    if (w.size() != impl.n) throw DomainError("support_function: dimension mismatch");
    const double len = w.norm();
    if (!(len > 0.0)) throw DomainError("support_function: zero direction");
    if (impl.support) return impl.support(w);
    const Vec dir = w / len;

    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    const double* d = impl.dirs.data();
    for (int i = 0; i < impl.dirs.size(); ++i) {
        double dot = 0.0;
        for (int k = 0; k < impl.n; ++k) dot += d[i * impl.n + k] * dir[k];
        const double val = impl.radii[i] * dot;
        if (val > best_value) best_value = val, best = i;
    }
    if (impl.n == 1 || (impl.n >= 3 && !impl.exact)) return len * best_value;

    auto objective = [&](const Vec& u) { return impl.radial(u) * u.dot(dir); };
    const auto refined = detail::maximize_on_sphere(objective, impl.dirs[best], 1.5 * impl.dirs.angular_spacing());
    return len * std::max(best_value, refined.value);
}

StarBody polar(const StarBody& body) {
    const auto& src = body.impl_;
    const std::vector<double> h = kernels::support_batch(body, src->dirs);
    std::vector<double> radii(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw DomainError("polar: origin is not interior (support <= 0)");
        radii[i] = 1.0 / h[i];
    }
    auto impl = std::make_shared<StarBody::Impl>(src->dirs, std::move(radii));
    impl->exact = [body](const Vec& u) {
        const double hu = support_function(body, u);
        if (!(hu > 0.0)) throw DomainError("polar: origin is not interior (support <= 0)");
        return 1.0 / hu;
    };
    // For convex K, h_{K°} is the gauge of K.
    if (is_convex(body)) {
        impl->support = [body](const Vec& w) {
            const double len = w.norm();
            return len / body.radial(w / len);
        };
    }
    return StarBody(std::move(impl));
}

// ---------------------------------------------------------------- convexity / distance

namespace {

std::vector<std::pair<int, int>> boundary_pairs(int n, int m) {
    std::vector<int> offsets;
    if (n == 2) {
        for (int k = 1; k <= m / 2; k = std::max(k + 1, k * 3 / 2)) offsets.push_back(k);
    } else {
        // Index offsets that are Fibonacci numbers are spatial neighbours on the Fibonacci sphere.
        for (int a = 1, b = 2; a <= m / 2; std::tie(a, b) = std::pair{b, a + b}) offsets.push_back(a);
    }
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(m) * (offsets.size() + 4));
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int i = 0; i < m; ++i) {
        for (int k : offsets) pairs.emplace_back(i, (i + k) % m);
        if (n >= 3)
            for (int r = 0; r < 4; ++r) pairs.emplace_back(i, pick(rng));
    }
    return pairs;
}

}  // namespace

bool is_convex(const StarBody& body, double tol) {
    const auto& impl = *body.impl_;
    if (impl.n == 1) return true;
    const bool cacheable = tol == 1e-9;
    if (cacheable) {
        const int cached = impl.convex_cache.load();
        if (cached >= 0) return cached == 1;
    }
    const bool convex = kernels::max_midpoint_excess(body, boundary_pairs(impl.n, impl.dirs.size())) <= tol;
    if (cacheable) impl.convex_cache.store(convex ? 1 : 0);
    return convex;
}

double hausdorff_distance(const StarBody& a, const StarBody& b, int m) {
    if (a.dim() != b.dim()) throw DomainError("hausdorff_distance: dimension mismatch");
    if (!is_convex(a) || !is_convex(b)) throw DomainError("hausdorff_distance: non-convex body");
    const int count = m > 0 ? m : std::max(a.directions().size(), b.directions().size());
    return kernels::max_support_gap(a, b, DirectionSet::standard(a.dim(), count));
}

double lipschitz_estimate(const BodyField& field, const Box& region, double step, const LipschitzOptions& opts) {
    if (!(step > 0.0)) throw DomainError("lipschitz_estimate: step must be positive");
    const int dim = static_cast<int>(region.lo.size());
    if (region.hi.size() != dim) throw DomainError("lipschitz_estimate: malformed region");

    const int k = std::max(1, opts.samples_per_axis);
    std::vector<Vec> points{Vec::Zero(dim)};
    for (int axis = 0; axis < dim; ++axis) {
        std::vector<Vec> next;
        const bool flat = region.hi[axis] <= region.lo[axis] || k == 1;
        const int count = flat ? 1 : k;
        for (const Vec& base : points)
            for (int i = 0; i < count; ++i) {
                Vec x = base;
                x[axis] = flat ? region.lo[axis] : region.lo[axis] + (region.hi[axis] - region.lo[axis]) * i / (k - 1);
                next.push_back(x);
            }
        points = std::move(next);
    }

    // Bodies at base points, then at each axis-shifted partner.
    const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(points.size());
    std::vector<std::optional<StarBody>> base(np);
    std::vector<std::optional<StarBody>> shifted(np * dim);
    detail::parallel_for(np * (dim + 1), [&](std::ptrdiff_t idx) {
        const std::ptrdiff_t i = idx / (dim + 1);
        const int axis = static_cast<int>(idx % (dim + 1)) - 1;
        if (axis < 0) {
            base[i] = field(points[i]);
        } else {
            Vec x = points[i];
            x[axis] += step;
            shifted[i * dim + axis] = field(x);
        }
    });
    for (const auto& b : base)
        if (!is_convex(*b)) throw DomainError("lipschitz_estimate: non-convex body in region");
    for (const auto& b : shifted)
        if (!is_convex(*b)) throw DomainError("lipschitz_estimate: non-convex body in region");

    double worst = 0.0;
    for (std::ptrdiff_t i = 0; i < np; ++i)
        for (int axis = 0; axis < dim; ++axis)
            worst = std::max(worst, hausdorff_distance(*base[i], *shifted[i * dim + axis], opts.directions) / step);
    return worst;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_body_csv(std::ostream& out, const StarBody& body) {
    const int n = body.dim();
    for (int k = 0; k < n; ++k) out << 'u' << (k + 1) << ',';
    out << "radius\n";
    for (int i = 0; i < body.directions().size(); ++i) {
        const Vec u = body.directions()[i];
        for (int k = 0; k < n; ++k) out << format_number(u[k]) << ',';
        out << format_number(body.radii()[i]) << '\n';
    }
}

StarBody read_body_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("body csv: missing header");
    const int n = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (n < 1 || n > 4) throw DomainError("body csv: malformed header");
    std::vector<Vec> dirs;
    std::vector<double> radii;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        Vec u(n);
        double r = 0.0;
        for (int k = 0; k <= n; ++k) {
            if (!std::getline(row, cell, ',')) throw DomainError("body csv: short row");
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc()) throw DomainError("body csv: bad number '" + cell + "'");
            if (k < n) u[k] = v;
            else r = v;
        }
        dirs.push_back(u);
        radii.push_back(r);
    }
    const DirectionSet standard = DirectionSet::standard(n, static_cast<int>(dirs.size()));
    for (int i = 0; i < standard.size(); ++i)
        if ((standard[i] - dirs[i]).norm() > 1e-12) throw DomainError("body csv: directions are not a standard set");
    return StarBody::from_samples(standard, std::move(radii));
}

}  // namespace conepath

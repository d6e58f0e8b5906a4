#include "conepath/detail/refine.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace conepath::detail {

Maximum maximize_interval(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t max_iter = 200;
    auto [x, fx] = boost::math::tools::brent_find_minima([&](double s) { return -f(s); }, lo, hi,
                                                         std::numeric_limits<double>::digits / 2 + 4, max_iter);
    Vec out(1);
    out[0] = x;
    return {out, -fx, max_iter < 200};
}

Maximum maximize_nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, double scale, double xtol,
                             int max_iter) {
    const int k = static_cast<int>(x0.size());
    std::vector<Vec> simplex(k + 1, x0);
    std::vector<double> values(k + 1);
    for (int i = 0; i < k; ++i) simplex[i + 1][i] += scale;
    for (int i = 0; i <= k; ++i) values[i] = f(simplex[i]);

    std::vector<int> order(k + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
        const int best = order.front();
        const int worst = order.back();
        const int second_worst = order[k - 1];

        double size = 0.0;
        for (int i = 0; i <= k; ++i) size = std::max(size, (simplex[i] - simplex[best]).lpNorm<Eigen::Infinity>());
        if (size < xtol) return {simplex[best], values[best], true};

        Vec centroid = Vec::Zero(k);
        for (int i = 0; i <= k; ++i)
            if (i != worst) centroid += simplex[i];
        centroid /= k;

        const Vec reflected = centroid + (centroid - simplex[worst]);
        const double fr = f(reflected);
        if (fr > values[best]) {
            const Vec expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = f(expanded);
            if (fe > fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr > values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const Vec contracted = centroid + 0.5 * (simplex[worst] - centroid);
        const double fc = f(contracted);
        if (fc > values[worst]) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (int i = 0; i <= k; ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = f(simplex[i]);
        }
    }
    const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], false};
}

Maximum maximize_on_sphere(const std::function<double(const Vec&)>& f, const Vec& start, double spread) {
    const int n = static_cast<int>(start.size());
    const Vec u0 = start.normalized();
    if (n == 2) {
        const double theta0 = std::atan2(u0[1], u0[0]);
        auto m = maximize_interval([&](double th) { return f(unit_circle(th)); }, theta0 - spread, theta0 + spread);
        return {unit_circle(m.x[0]), m.value, m.converged};
    }
    // Orthonormal tangent frame at u0: the trailing columns of a Householder QR.
    Mat col(n, 1);
    col.col(0) = u0;
    const Mat q = Eigen::HouseholderQR<Mat>(col).householderQ();
    const Mat tangent = q.rightCols(n - 1);
    auto lift = [&](const Vec& x) -> Vec { return (u0 + tangent * x).normalized(); };
    auto m = maximize_nelder_mead([&](const Vec& x) { return f(lift(x)); }, Vec::Zero(n - 1), 0.5 * spread, 1e-10);
    return {lift(m.x), m.value, m.converged};
}

}  // namespace conepath::detail

#include "conepath/kernels.hpp"

#include "conepath/detail/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace conepath::kernels {

std::vector<double> radial_batch(const StarBody::RadialFn& radial, const DirectionSet& dirs) {
    std::vector<double> out(dirs.size());
    detail::parallel_for(dirs.size(), [&](std::ptrdiff_t i) { out[i] = radial(dirs[static_cast<int>(i)]); });
    return out;
}

std::vector<double> radial_batch_serial(const StarBody::RadialFn& radial, const DirectionSet& dirs) {
    std::vector<double> out(dirs.size());
    for (int i = 0; i < dirs.size(); ++i) out[i] = radial(dirs[i]);
    return out;
}

std::vector<double> support_batch(const StarBody& body, const DirectionSet& dirs) {
    std::vector<double> out(dirs.size());
    detail::parallel_for(dirs.size(), [&](std::ptrdiff_t i) { out[i] = support_function(body, dirs[static_cast<int>(i)]); });
    return out;
}

std::vector<double> support_batch_serial(const StarBody& body, const DirectionSet& dirs) {
    std::vector<double> out(dirs.size());
    for (int i = 0; i < dirs.size(); ++i) out[i] = support_function(body, dirs[i]);
    return out;
}

double max_support_gap(const StarBody& a, const StarBody& b, const DirectionSet& dirs) {
    std::vector<double> gap(dirs.size());
    detail::parallel_for(dirs.size(), [&](std::ptrdiff_t i) {
        const Vec u = dirs[static_cast<int>(i)];
        gap[i] = std::abs(support_function(a, u) - support_function(b, u));
    });
    return gap.empty() ? 0.0 : *std::max_element(gap.begin(), gap.end());
}

double max_support_gap_serial(const StarBody& a, const StarBody& b, const DirectionSet& dirs) {
    double worst = 0.0;
    for (int i = 0; i < dirs.size(); ++i) {
        const Vec u = dirs[i];
        worst = std::max(worst, std::abs(support_function(a, u) - support_function(b, u)));
    }
    return worst;
}

namespace {

double midpoint_excess(const StarBody& body, int i, int j) {
    const Vec mid = 0.5 * (body.boundary_point(i) + body.boundary_point(j));
    const double len = mid.norm();
    if (len < 1e-12) return -1.0;
    return len / body.radial(mid / len) - 1.0;
}

}  // namespace

double max_midpoint_excess(const StarBody& body, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<double> excess(pairs.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(pairs.size()),
                         [&](std::ptrdiff_t k) { excess[k] = midpoint_excess(body, pairs[k].first, pairs[k].second); });
    return excess.empty() ? -1.0 : *std::max_element(excess.begin(), excess.end());
}

double max_midpoint_excess_serial(const StarBody& body, const std::vector<std::pair<int, int>>& pairs) {
    double worst = -1.0;
    for (const auto& [i, j] : pairs) worst = std::max(worst, midpoint_excess(body, i, j));
    return worst;
}

}  // namespace conepath::kernels

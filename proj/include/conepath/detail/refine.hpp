#pragma once

#include "conepath/types.hpp"

#include <functional>

namespace conepath::detail {

struct Maximum {
    Vec x;  // for direction searches: the unit direction
    double value;
    bool converged;
};

/// Maximizes f over [lo, hi] with Brent's method (golden section with parabolic steps).
Maximum maximize_interval(const std::function<double(double)>& f, double lo, double hi);

/// Nelder-Mead maximization in R^k started from x0 with initial simplex edge `scale`.
Maximum maximize_nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, double scale, double xtol,
                             int max_iter = 2000);

/// Maximizes f over unit directions near `start` (any dimension >= 2).
/// `spread` is the angular half-width of the local search.
Maximum maximize_on_sphere(const std::function<double(const Vec&)>& f, const Vec& start, double spread);

/// Unit direction at angle theta in the plane.
inline Vec unit_circle(double theta) { return vec2(std::cos(theta), std::sin(theta)); }

}  // namespace conepath::detail

#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a plain serial twin with
// identical per-element arithmetic; the twins are the reference the tests
// compare against, and bench/ measures one against the other.

#include "conepath/convex_duality.hpp"

#include <utility>
#include <vector>

namespace conepath::kernels {

/// Radial function evaluated over a direction set.
std::vector<double> radial_batch(const StarBody::RadialFn& radial, const DirectionSet& dirs);
std::vector<double> radial_batch_serial(const StarBody::RadialFn& radial, const DirectionSet& dirs);

/// Support function over a direction set.
std::vector<double> support_batch(const StarBody& body, const DirectionSet& dirs);
std::vector<double> support_batch_serial(const StarBody& body, const DirectionSet& dirs);

/// max_i |h_a(u_i) - h_b(u_i)|.
double max_support_gap(const StarBody& a, const StarBody& b, const DirectionSet& dirs);
double max_support_gap_serial(const StarBody& a, const StarBody& b, const DirectionSet& dirs);

/// Largest relative excess |m| / r(m/|m|) - 1 over midpoints m of the given boundary pairs.
double max_midpoint_excess(const StarBody& body, const std::vector<std::pair<int, int>>& pairs);
double max_midpoint_excess_serial(const StarBody& body, const std::vector<std::pair<int, int>>& pairs);

}  // namespace conepath::kernels

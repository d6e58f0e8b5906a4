#pragma once

#include "conepath/directions.hpp"
#include "conepath/types.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace conepath {

/// Fibre-wise star-shaped body with the origin in its interior.
///
/// Stored as radii over a standard DirectionSet. A body may also carry an exact
/// radial function (closed form), in which case support evaluation refines
/// between samples against it. Sampled planar bodies interpolate their radial
/// function with a periodic cubic spline in the angle; sampled bodies in
/// dimension >= 3 use inverse-distance weighting of the nearest samples.
class StarBody {
public:
    using RadialFn = std::function<double(const Vec& unit)>;
    using SupportFn = std::function<double(const Vec& w)>;

    static StarBody from_samples(const DirectionSet& dirs, std::vector<double> radii);
    /// m = 0 selects DirectionSet::default_count(n).
    static StarBody closed_form(int n, RadialFn radial, int m = 0);
    /// Same body with an exact support function attached.
    StarBody with_support(SupportFn support) const;

    int dim() const;
    const DirectionSet& directions() const;
    const std::vector<double>& radii() const;
    bool is_closed_form() const;
    bool has_exact_support() const;

    /// Radial function at a unit direction.
    double radial(const Vec& unit) const;
    bool contains(const Vec& x, double tol = 1e-9) const;
    Vec boundary_point(int i) const;
    /// lambda * K.
    StarBody scaled(double lambda) const;

private:
    struct Impl;
    explicit StarBody(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend double support_function(const StarBody& body, const Vec& w);
    friend StarBody polar(const StarBody& body);
    friend bool is_convex(const StarBody& body, double tol);
};

/// h_K(w) = max over K of <v, w>; 1-homogeneous in w.
double support_function(const StarBody& body, const Vec& w);

/// K° = { w : <v, w> <= 1 for all v in K }, with radial function 1/h_K. Always convex.
StarBody polar(const StarBody& body);

/// Midpoint test over sampled boundary pairs.
bool is_convex(const StarBody& body, double tol = 1e-9);

/// max_u |h_1(u) - h_2(u)| over a standard direction set; both bodies must be convex.
/// m = 0 uses the larger of the two bodies' sample counts.
double hausdorff_distance(const StarBody& a, const StarBody& b, int m = 0);

struct Box {
    Vec lo;
    Vec hi;
};

struct LipschitzOptions {
    int samples_per_axis = 2;
    int directions = 0;  // Hausdorff direction count, 0 = default
};

using BodyField = std::function<StarBody(const Vec& x)>;

/// max over sampled pairs (x, x + step e_k) of d_H / step.
double lipschitz_estimate(const BodyField& field, const Box& region, double step, const LipschitzOptions& opts = {});

/// CSV with header u1..un,radius and one row per sample.
void write_body_csv(std::ostream& out, const StarBody& body);
StarBody read_body_csv(std::istream& in);

}  // namespace conepath

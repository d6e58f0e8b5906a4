#pragma once

// Contact geometry of ST*Sigma in the co-sphere model. Tangent vectors of
// T*Sigma are stacked as u = (base components, fibre components) in R^{2n}.
//
// Sign convention for skies: margins are computed in ST*Sigma, where the sky
// map reverses the coorientation. A future timelike curve therefore has
// strictly NEGATIVE isotopy margins; a cone geodesic has margin 0 at its own
// tangent ray.

#include "conepath/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace conepath {

/// A ray on the unit co-sphere {H_t = 1} with an orthonormal frame of the co-sphere's tangent space.
struct ContactSample {
    double t = 0.0;
    RayPoint ray;             // normalization unit_dual_finsler, t_norm = t
    std::vector<Vec> basis;   // 2n - 1 vectors in R^{2n}
};

/// Rescales v onto {H_t(p, .) = 1} and builds the tangent frame from the complement of dH.
ContactSample make_contact_sample(const Generator& gen, double t, const Vec& p, const Vec& v);

/// lambda_v(u) = v(d pi(u)).
double liouville_pairing(const Vec& v, const Vec& u);

/// alpha_t(u) at the sample; the representative must lie on {H_t = 1} within 1e-8.
double contact_form_eval(const Generator& gen, const ContactSample& sample, const Vec& u);

/// d alpha_t(X, Y) by centred differences of alpha along the straight-line flows of X and Y.
double dalpha(const ContactSample& sample, const Vec& X, const Vec& Y, double eps = 1e-4);

/// Generating vector field of the path at time t, read off by centred differences of the
/// flow through the sample and renormalized onto the time-t co-sphere.
Vec path_vector_field(const PositivePath& path, const ContactSample& sample, double delta = 1e-4);

struct ReebReport {
    double alpha_of_X;
    double max_dalpha_contraction;
};

ReebReport verify_reeb_conditions(const PositivePath& path, const ContactSample& sample);
/// Same with an explicit candidate field X.
ReebReport verify_reeb_conditions(const ContactSample& sample, const Vec& X);

/// |alpha ^ (d alpha)^{n-1}| on the sample frame, divided by |v|.
double contact_volume(const ContactSample& sample);

/// lambda(d/dt phi_t(ray)) at the representative selected by ray.normalization
/// (unit-Euclidean, unit |H_t|, or the lifted flow image for `free`).
double positivity_margin(const PositivePath& path, double t, const RayPoint& ray, double delta = 1e-4);

/// The sky of (t, p) in ST*Sigma at time 0: phi_t^{-1} of m unit covectors at p.
std::vector<RayPoint> sky(const PositivePath& path, const SpacetimeEvent& event, int m = 64);

struct CurvePoint {
    double t;
    Vec p;
};
using SpacetimeCurve = std::function<CurvePoint(double s)>;

/// lambda of d/ds phi_{t(s)}^{-1}(gamma(s), u) at the representative with H_{t(s)}(u) = 1.
double isotopy_margin(const PositivePath& path, const SpacetimeCurve& curve, double s, const Vec& u, double ds = 1e-4);

struct SkyIsotopy {
    std::vector<double> s;
    std::vector<std::vector<RayPoint>> skies;
    std::vector<std::vector<double>> margins;  // [sample][ray]
    double min_margin = 0.0;
    double max_margin = 0.0;
    /// "timelike-consistent" (all < 0), "causal-consistent" (all <= 1e-6) or "not causal".
    std::string verdict;

    nlohmann::json to_json() const;
};

SkyIsotopy sky_isotopy_positivity(const PositivePath& path, const SpacetimeCurve& curve, const std::vector<double>& s,
                                  int m = 64);

/// CSV columns s,ray,margin.
void write_margins_csv(std::ostream& out, const SkyIsotopy& iso);

}  // namespace conepath

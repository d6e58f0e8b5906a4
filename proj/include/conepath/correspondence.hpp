#pragma once

#include "conepath/cone_structures.hpp"
#include "conepath/contact_layer.hpp"
#include "conepath/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <vector>

namespace conepath {

/// Positive path generated by H_t = F*_t, the Reeb field of the contact forms alpha_t.
PositivePath path_from_cone(const ConeStructure& cone, IntegratorConfig cfg = {});

/// F_t recovered as the gauge of the dt = 1 slice, by bisection on cone membership.
FinslerFamily finsler_from_cone_slices(const ConeStructure& cone);
/// Same for a cone given by G. With co-balls the gauge of the slice K° is h_K;
/// otherwise bisection on {G >= 0}.
FinslerFamily finsler_from_cone_slices(const LorentzFinslerSpace& space);

struct ConeFromPathOptions {
    int directions = 0;          // co-ball samples; 0 = DirectionSet::default_count
    int positivity_rays = 16;    // precheck sample
};

/// C_f with K_t^f(p) = {v : H_t(p, v) <= 1} sampled at 1/H over a direction set,
/// and G_f = w0 - h_K(w). Throws "path not positive" if the precheck finds a
/// nonpositive margin.
LorentzFinslerSpace cone_from_path(const PositivePath& path, const ConeFromPathOptions& opts = {});

struct RoundtripGrid {
    int times = 5;
    double t_lo = 0.0;
    double t_hi = 1.0;
    int points = 8;
    Vec p_lo;  // empty: [0, period) on a torus, [-1, 1] otherwise
    Vec p_hi;
    int directions = 0;
    int g_samples = 16;
    unsigned seed = 1;
    double tol_hausdorff = 1e-3;
    double tol_g = 1e-3;
};

struct RoundtripCell {
    double t;
    Vec p;
    double hausdorff;
    double g_error;
};

struct RoundtripReport {
    std::vector<RoundtripCell> cells;
    double max_hausdorff = 0.0;
    double max_g_error = 0.0;
    IntegratorConfig config;
    int directions = 0;
    double tol_hausdorff = 0.0;
    double tol_g = 0.0;

    bool pass() const { return max_hausdorff <= tol_hausdorff && max_g_error <= tol_g; }
    nlohmann::json to_json() const;
};

/// path_from_cone then cone_from_path; slices compared by Hausdorff distance, G by sampling.
RoundtripReport roundtrip_check(const ConeStructure& cone, const RoundtripGrid& grid, IntegratorConfig cfg = {});

/// CSV columns t,p1..pn,hausdorff,g_error.
void write_roundtrip_csv(std::ostream& out, const RoundtripReport& report);

struct ProbeRay {
    RayPoint ray;
    int crossings = 0;
    bool blow_up = false;
    double max_causal_excess = 0.0;  // max of h_K(w) - 1 (or F(w) - 1) along the curve
    std::string error;
};

struct ProbeReport {
    double horizon = 0.0;
    std::vector<ProbeRay> rays;
    int single_crossing = 0;
    int blow_ups = 0;
    int acausal = 0;

    double single_crossing_fraction() const { return rays.empty() ? 0.0 : double(single_crossing) / rays.size(); }
    nlohmann::json to_json() const;
};

/// Experimental evidence for the global hyperbolicity of C_f: integrates the
/// boundary extremals t -> (t, pi(f_t(v))) over [-T, T] and records crossings of
/// {t = 0}, blow-ups and the causal character of the tangents. Never a proof.
ProbeReport cauchy_crossing_probe(const PositivePath& path, const LorentzFinslerSpace& space,
                                  const std::vector<RayPoint>& rays, double horizon, double step = 1e-2);

}  // namespace conepath

#pragma once

#include "conepath/base_geometry.hpp"
#include "conepath/convex_duality.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace conepath {

enum class CausalType { future_timelike, future_null, past_timelike, past_null, non_causal };

const char* to_string(CausalType type);
inline bool is_future(CausalType c) { return c == CausalType::future_timelike || c == CausalType::future_null; }
inline bool is_past(CausalType c) { return c == CausalType::past_timelike || c == CausalType::past_null; }

/// Cone structure of splitting type on R x Sigma: C = { w0 >= F_t(w) }.
class ConeStructure {
public:
    ConeStructure(BaseManifold base, FinslerFamily finsler);

    const BaseManifold& base() const { return base_; }
    const FinslerFamily& finsler() const { return finsler_; }
    int dim() const { return base_.dim(); }

    /// L = w0^2 - F_t(w)^2.
    double lorentz_finsler(double t, const Vec& p, const SpacetimeVector& sv) const;
    bool contains(double t, const Vec& p, const SpacetimeVector& sv, double tol = 1e-9) const;

private:
    BaseManifold base_;
    FinslerFamily finsler_;
};

/// Null band: |w0 - F(w)| <= 1e-9 |sv|.
CausalType classify(const ConeStructure& cone, double t, const BasePoint& p, const SpacetimeVector& sv);

/// The unit Finsler ball {F_t(p, .) <= 1} = ({dt = 1} cap C) - d/dt.
StarBody cone_slice(const ConeStructure& cone, double t, const BasePoint& p, int m = 0);

/// Proper cone structure with a positively 1-homogeneous concave G, C = {G >= 0}.
///
/// Usually built from a field of co-balls K_t(p), where G = w0 - h_K(w) and the
/// dt = 1 slice of the cone is the polar of K.
class LorentzFinslerSpace {
public:
    using GFn = std::function<double(double t, const Vec& p, const SpacetimeVector& sv)>;
    using CoballFn = std::function<StarBody(double t, const Vec& p)>;

    static LorentzFinslerSpace from_coballs(int n, CoballFn coball);
    /// Arbitrary G; `coball` (optional) supplies the slices for the Lipschitz checks.
    static LorentzFinslerSpace from_function(int n, GFn g, CoballFn coball = {});

    int dim() const { return n_; }
    double G(double t, const Vec& p, const SpacetimeVector& sv) const { return g_(t, p, sv); }
    bool contains(double t, const Vec& p, const SpacetimeVector& sv, double tol = 1e-9) const;
    bool has_coballs() const { return static_cast<bool>(coball_); }
    StarBody coball(double t, const Vec& p) const;
    /// ({dt = 1} cap C) - d/dt, i.e. the polar of the co-ball.
    StarBody slice(double t, const Vec& p) const;

private:
    LorentzFinslerSpace(int n, GFn g, CoballFn coball) : n_(n), g_(std::move(g)), coball_(std::move(coball)) {}

    int n_;
    GFn g_;
    CoballFn coball_;
};

double G_eval(const LorentzFinslerSpace& space, double t, const BasePoint& p, const SpacetimeVector& sv);

/// Slice of the doubled cone C^x at (s,t,p) with dt = 1: the polar of the
/// cylinder A = K x [-1, 1] in the co-fibre augmented by ds.
StarBody doubled_cone_slice(const StarBody& coball, int m = 0);

struct LorentzFinslerRegion {
    double t_lo = 0.0;
    double t_hi = 1.0;
    Vec p_lo;
    Vec p_hi;
    double s_lo = 0.0;
    double s_hi = 1.0;
    int fibres_per_axis = 2;
    int concavity_pairs = 500;
    int homogeneity_samples = 100;
    double lipschitz_step = 0.1;
    int augmented_directions = 512;
    unsigned seed = 7;
};

struct ViolationRecord {
    std::string name;
    double t;
    Vec p;
    double magnitude;
};

struct LorentzFinslerReport {
    double max_homogeneity_violation = 0.0;
    double max_concavity_violation = 0.0;
    int slices_checked = 0;
    int nonconvex_slices = 0;
    double lipschitz = 0.0;
    double lipschitz_half_step = 0.0;
    bool lipschitz_finite = false;
    std::vector<ViolationRecord> records;

    /// Lipschitz estimates at step and step/2 agree within 10%.
    bool lipschitz_stable() const;
    nlohmann::json to_json() const;
};

/// Sampled verification that (C, G) is a locally Lipschitz Lorentz-Finsler space.
/// Non-convex slices are reported, never thrown.
LorentzFinslerReport check_lorentz_finsler_space(const LorentzFinslerSpace& space, const LorentzFinslerRegion& region);

nlohmann::json vec_to_json(const Vec& v);

}  // namespace conepath

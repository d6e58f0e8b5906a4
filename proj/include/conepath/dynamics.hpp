#pragma once

#include "conepath/base_geometry.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace conepath {

enum class Normalization {
    free,               // any positive multiple
    unit_euclidean,     // |v| = 1
    unit_dual_finsler,  // F*_t(p, v) = 1 at t = t_norm
};

/// A point of ST*Sigma carried by a covector representative v != 0 at p.
struct RayPoint {
    Vec p;
    Vec v;
    Normalization normalization = Normalization::free;
    double t_norm = 0.0;

    static RayPoint unit(const Vec& p, const Vec& v);
};

/// Base distance (minimal image) plus the chord between unit representatives.
double ray_distance(const BaseManifold& base, const RayPoint& a, const RayPoint& b);

/// Integration left the representative band |v| in [1e-8, 1e8]; carries the last good state.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double t, Vec p, Vec v)
        : NumericalError(what + " at t = " + std::to_string(t), v.norm()), t_(t), p_(std::move(p)), v_(std::move(v)) {}

    double t() const { return t_; }
    const Vec& p() const { return p_; }
    const Vec& v() const { return v_; }

private:
    double t_;
    Vec p_;
    Vec v_;
};

/// Time-dependent Hamiltonian H_t(p, v) on T*Sigma minus the zero section,
/// positively 1-homogeneous in v. Its Hamiltonian flow descends to the contact
/// isotopy of ST*Sigma whose contact Hamiltonian (w.r.t. the Liouville form) is H.
class Generator {
public:
    using Fn = std::function<double(double t, const Vec& p, const Vec& v)>;
    using GradFn = std::function<Vec(double t, const Vec& p, const Vec& v)>;

    /// H_t = F*_t; v-gradient in closed form where the metric kind has one.
    static Generator dual_finsler(FinslerFamily fam);
    /// User data; missing gradients fall back to fourth-order central differences.
    static Generator hamiltonian(int n, Fn h, GradFn grad_v = {}, GradFn grad_p = {});

    int dim() const;
    double value(double t, const Vec& p, const Vec& v) const;
    Vec grad_v(double t, const Vec& p, const Vec& v) const;
    Vec grad_p(double t, const Vec& p, const Vec& v) const;

    /// Generator of s -> phi_{-s}: H_rev(t) = -H(-t).
    Generator reversed() const;
    bool is_reversed() const;
    /// Non-null for dual_finsler generators (not for their reversal).
    const FinslerFamily* finsler() const;

    /// Declares H independent of t and p; lets consumers cache per-fibre data.
    Generator with_invariant(bool invariant) const;
    bool invariant() const;

private:
    struct Impl;
    explicit Generator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

struct IntegratorConfig {
    double step = 1e-3;
    double horizon = 10.0;
};

/// Discretized positive path phi_t of contactomorphisms of ST*Sigma.
class PositivePath {
public:
    static PositivePath from_finsler(BaseManifold base, FinslerFamily fam, IntegratorConfig cfg = {});
    static PositivePath from_hamiltonian(BaseManifold base, Generator gen, IntegratorConfig cfg = {});

    int dim() const { return base_.dim(); }
    const BaseManifold& base() const { return base_; }
    const Generator& generator() const { return gen_; }
    const IntegratorConfig& config() const { return cfg_; }
    PositivePath with_config(IntegratorConfig cfg) const;
    /// t -> phi_{-t}.
    PositivePath reversed() const;

private:
    PositivePath(BaseManifold base, Generator gen, IntegratorConfig cfg);

    BaseManifold base_;
    Generator gen_;
    IntegratorConfig cfg_;
};

/// Dense RK4 samples. v[i] is the unit-Euclidean representative (the initial
/// one as given); the lifted Hamiltonian-flow representative is exp(log_scale[i]) v[i].
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> p;  // unwrapped chart coordinates
    std::vector<Vec> v;
    std::vector<double> log_scale;

    std::size_t size() const { return t.size(); }
    Vec lifted(std::size_t i) const { return std::exp(log_scale[i]) * v[i]; }
};

/// p' = dH/dv, v' = -dH/dp with classical fourth-order Runge-Kutta from t0 to t1.
/// The step is shrunk so that t1 is hit exactly.
Trajectory integrate_cogeodesic(const Generator& gen, const RayPoint& ray, double t0, double t1, double step);
Trajectory integrate_cogeodesic(const FinslerFamily& fam, const RayPoint& ray, double t0, double t1, double step);

/// phi_t(ray); the representative is the lifted flow image of the given one.
RayPoint path_apply(const PositivePath& path, double t, const RayPoint& ray);
/// phi_t^{-1}(ray), by integrating from t back to 0.
RayPoint inverse_path_apply(const PositivePath& path, double t, const RayPoint& ray);

std::vector<RayPoint> path_apply_batch(const PositivePath& path, double t, const std::vector<RayPoint>& rays);
std::vector<RayPoint> path_apply_batch_serial(const PositivePath& path, double t, const std::vector<RayPoint>& rays);

/// Curve in R x Sigma parametrized by t, with spatial velocity dp/dt.
struct SpacetimeTrajectory {
    std::vector<double> t;
    std::vector<Vec> p;
    std::vector<Vec> w;
    std::vector<double> null_residual;  // F_t(p, w) - 1, or the cone-side analogue

    std::size_t size() const { return t.size(); }
};

/// Null geodesic of L = dt^2 - F_t^2 from the Euler-Lagrange spray, with spray
/// coefficients from finite differences of L. Requires sv future-null.
SpacetimeTrajectory lagrangian_geodesic(const FinslerFamily& fam, const SpacetimeEvent& event, const SpacetimeVector& sv,
                                        double t1, double step = 1e-3);

/// gamma(t) = (t, pi(phi_t(ray))) on [t_min, t_max].
SpacetimeTrajectory cone_geodesic(const PositivePath& path, const RayPoint& ray, double t_min, double t_max);

/// CSV columns t,p1..pn,v1..vn,H_residual; H_residual = H_t(lifted v) - H_{t0}(v0).
void write_trajectory_csv(std::ostream& out, const Generator& gen, const Trajectory& traj);

}  // namespace conepath

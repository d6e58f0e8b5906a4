#pragma once

#include "conepath/types.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace conepath {

enum class Topology { torus, euclidean };

/// Flat base manifold: a torus [0,L)^n or Euclidean R^n, n in {1,2,3}.
class BaseManifold {
public:
    static BaseManifold euclidean(int dim);
    static BaseManifold torus(int dim, double period);
    static BaseManifold torus(const Vec& periods);

    int dim() const { return dim_; }
    Topology topology() const { return topology_; }
    const Vec& periods() const { return periods_; }

    /// Wraps chart coordinates into the fundamental domain (identity on R^n).
    Vec wrap(const Vec& coords) const;
    /// Shortest chart displacement from `a` to `b` (minimal image on the torus).
    Vec displacement(const Vec& a, const Vec& b) const;

private:
    BaseManifold(int dim, Topology topology, Vec periods);

    int dim_;
    Topology topology_;
    Vec periods_;
};

class BasePoint {
public:
    BasePoint(const BaseManifold& manifold, const Vec& coords);
    /// A point of R^n given in chart coordinates, no wrapping.
    explicit BasePoint(const Vec& coords) : coords_(coords) {}

    const Vec& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }

private:
    Vec coords_;
};

struct TangentVector {
    Vec c;
};

struct Covector {
    Vec c;
};

inline double pairing(const Covector& v, const TangentVector& w) { return v.c.dot(w.c); }

struct SpacetimeEvent {
    double t;
    BasePoint p;
};

/// (w0, w) in T(R x Sigma); w0 is the dt-component.
struct SpacetimeVector {
    double w0;
    TangentVector w;
};

/// Time-dependent coefficient fields of the metric families, in chart coordinates.
using MatrixField = std::function<Mat(double t, const Vec& p)>;
using OneFormField = std::function<Vec(double t, const Vec& p)>;
using NormField = std::function<double(double t, const Vec& p, const Vec& w)>;

enum class FinslerKind { euclidean, riemannian, randers, custom };

/// F_t(p, .) with its coefficients evaluated once; the hot-loop interface.
class LocalNorm {
public:
    int dim() const { return n_; }
    FinslerKind kind() const { return kind_; }

    /// F(w); returns 0 for w = 0.
    double norm(const Vec& w) const;
    /// dF/dw, 0-homogeneous; w != 0.
    Vec gradient(const Vec& w) const;
    /// g_w = Hessian of F^2/2; closed form for the quadratic and Randers kinds.
    Mat fundamental_tensor(const Vec& w) const;
    /// Legendre transform g_w(w, .) = F(w) dF/dw.
    Vec legendre(const Vec& w) const;
    /// F*(v) = max { v(w) : F(w) <= 1 }.
    double dual(const Vec& v) const;
    /// dF*/dv, which is the maximizer w* of v(w) on {F = 1}.
    Vec dual_gradient(const Vec& v) const;

private:
    friend class FinslerFamily;
    LocalNorm() = default;

    struct DualMax {
        double value;
        Vec argmax;  // unit Finsler vector
    };
    DualMax custom_dual(const Vec& v) const;

    int n_ = 0;
    FinslerKind kind_ = FinslerKind::euclidean;
    Mat a_, a_inv_;
    Vec b_;
    double lambda_ = 1.0;  // 1 - |b|^2 in the dual A-metric (Randers)
    std::shared_ptr<const NormField> custom_;
    std::shared_ptr<const NormField> custom_dual_;
    double t_ = 0.0;
    Vec p_;
};

/// Box of (t, p) values where coefficient admissibility is sampled at construction.
struct AdmissibilityRegion {
    double t_lo = -10.0;
    double t_hi = 10.0;
    double p_lo = -5.0;
    double p_hi = 5.0;
    int samples_per_axis = 5;
};

/// Time-dependent Finsler metric F_t on the base.
class FinslerFamily {
public:
    static FinslerFamily euclidean(int n);
    static FinslerFamily riemannian(int n, MatrixField a, const AdmissibilityRegion& region = {});
    /// F = sqrt(w^T A w) + b(w); rejected unless b^T A^{-1} b < 1 at every sampled (t,p).
    static FinslerFamily randers(int n, MatrixField a, OneFormField b, const AdmissibilityRegion& region = {});
    static FinslerFamily custom(int n, NormField f);
    /// Custom norm with a known dual F*; dF*/dv is then taken by central differences.
    static FinslerFamily custom(int n, NormField f, NormField dual);

    int dim() const { return n_; }
    FinslerKind kind() const { return kind_; }
    LocalNorm at(double t, const Vec& p) const;

private:
    FinslerFamily() = default;

    int n_ = 0;
    FinslerKind kind_ = FinslerKind::euclidean;
    std::shared_ptr<const MatrixField> a_;
    std::shared_ptr<const OneFormField> b_;
    std::shared_ptr<const NormField> custom_;
    std::shared_ptr<const NormField> custom_dual_;
};

double eval_F(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w);

struct FundamentalTensor {
    Mat g;
    bool positive_definite;
};

FundamentalTensor fundamental_tensor(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w);

/// Half the central-difference Hessian of f^2 at w with relative step 1e-4 max(1,|w|), symmetrized.
Mat fd_half_hessian_of_square(const std::function<double(const Vec&)>& f, const Vec& w);

Covector legendre(const FinslerFamily& fam, double t, const BasePoint& p, const TangentVector& w);

double dual_norm(const FinslerFamily& fam, double t, const BasePoint& p, const Covector& v);

/// A curve in R x Sigma sampled at a strictly increasing parameter.
struct SampledCurve {
    std::vector<double> param;
    std::vector<double> t;
    std::vector<Vec> p;  // unwrapped chart coordinates

    std::size_t size() const { return param.size(); }
};

/// 1/2 * integral of L(gamma') with L = w0^2 - F_t(w)^2, composite trapezoid.
double energy(const FinslerFamily& fam, const SampledCurve& curve);

}  // namespace conepath

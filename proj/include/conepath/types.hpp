#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace conepath {

// Every vector in the engine lives in dimension <= 8 (phase space of a
// 3-dimensional base is 6, augmented spacetime is 5), so storage is inline.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Precondition or invariant violated by the caller's data.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method failed to meet its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

inline Vec zeros(int n) { return Vec::Zero(n); }

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace conepath

#pragma once

#include "conepath/types.hpp"

#include <memory>
#include <vector>

namespace conepath {

/// Deterministic set of unit directions in R^n.
///
/// n = 1: {+1, -1}. n = 2: uniform angles 2*pi*i/m starting at 0, so the set
/// doubles as a periodic grid for interpolation. n = 3: Fibonacci sphere.
/// n = 4: Gaussian directions from a fixed-seed generator.
class DirectionSet {
public:
    static DirectionSet standard(int n, int m);
    static DirectionSet standard(int n) { return standard(n, default_count(n)); }
    /// 512 (n=2) / 2048 (n=3) / 4096 (n=4) / 2 (n=1).
    static int default_count(int n);

    int dim() const { return n_; }
    int size() const { return m_; }
    Vec operator[](int i) const { return Eigen::Map<const Eigen::VectorXd>(data_->data() + i * n_, n_); }
    /// Raw row-major storage, m x n.
    const double* data() const { return data_->data(); }
    /// n = 2 only: angle of direction i.
    double angle(int i) const;
    double angular_spacing() const;

    bool operator==(const DirectionSet& other) const { return n_ == other.n_ && m_ == other.m_; }

private:
    DirectionSet(int n, int m, std::shared_ptr<const std::vector<double>> data)
        : n_(n), m_(m), data_(std::move(data)) {}

    int n_;
    int m_;
    std::shared_ptr<const std::vector<double>> data_;
};

}  // namespace conepath

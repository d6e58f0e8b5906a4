#include "conepath/directions.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace conepath {

namespace {

std::vector<double> generate(int n, int m) {
    std::vector<double> d(static_cast<std::size_t>(n) * m);
    switch (n) {
    case 1:
        d[0] = 1.0;
        d[1] = -1.0;
        break;
    case 2:
        for (int i = 0; i < m; ++i) {
            const double th = 2.0 * std::numbers::pi * i / m;
            d[2 * i] = std::cos(th);
            d[2 * i + 1] = std::sin(th);
        }
        break;
    case 3: {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < m; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / m;
            const double r = std::sqrt(1.0 - z * z);
            const double phi = golden * i;
            d[3 * i] = r * std::cos(phi);
            d[3 * i + 1] = r * std::sin(phi);
            d[3 * i + 2] = z;
        }
        break;
    }
    default: {
        std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(n));
        std::normal_distribution<double> g;
        for (int i = 0; i < m; ++i) {
            double norm2 = 0.0;
            for (int k = 0; k < n; ++k) {
                d[n * i + k] = g(rng);
                norm2 += d[n * i + k] * d[n * i + k];
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (int k = 0; k < n; ++k) d[n * i + k] *= inv;
        }
    }
    }
    return d;
}

}  // namespace

DirectionSet DirectionSet::standard(int n, int m) {
    if (n < 1 || n > 4) throw DomainError("direction sets exist for dimensions 1..4");
    if (n == 1) m = 2;
    if (m < 2) throw DomainError("direction set needs at least 2 directions");

    // Sets are immutable and shared; the cache only ever grows.
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<double>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, m}];
    if (!slot) slot = std::make_shared<const std::vector<double>>(generate(n, m));
    return DirectionSet(n, m, slot);
}

int DirectionSet::default_count(int n) {
    switch (n) {
    case 1: return 2;
    case 2: return 512;
    case 3: return 2048;
    default: return 4096;
    }
}

double DirectionSet::angle(int i) const { return 2.0 * std::numbers::pi * i / m_; }

double DirectionSet::angular_spacing() const {
    if (n_ == 2) return 2.0 * std::numbers::pi / m_;
    // Typical nearest-neighbour angle of m roughly uniform points on S^{n-1}.
    return std::pow(4.0 * std::numbers::pi / m_, 1.0 / (n_ - 1)) * (n_ == 3 ? 1.0 : 1.5);
}

}  // namespace conepath

#pragma once
// Lattice discretization of R^n into side-w hypercubes, and the trusted-region
// membership test. Key k names the half-open cube prod_i [k_i w, (k_i + 1) w),
// so every point belongs to exactly one bin. Trust is decided on the closed
// cube: a bin is trusted iff some point of it lies within distance m of the
// origin, which makes the trusted set cover the ball of radius m while every
// trusted point stays within R = m + sqrt(n) w.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "riskab/errors.hpp"
#include "riskab/mathutil.hpp"

namespace riskab {

using InputPoint = std::vector<double>;

struct BinKey {
    std::vector<std::int64_t> coords;

    bool operator==(const BinKey& other) const = default;
};

// FNV-1a over the coordinate bytes.
struct BinKeyHash {
    std::size_t operator()(const BinKey& key) const noexcept {
        std::uint64_t h = 14695981039346656037ull;
        for (std::int64_t c : key.coords) {
            auto u = static_cast<std::uint64_t>(c);
            for (int shift = 0; shift < 64; shift += 8) {
                h ^= (u >> shift) & 0xffu;
                h *= 1099511628211ull;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

struct TrustedRegion {
    double w = 1.0;
    double m = 0.0;
    int n = 1;
    double R = 0.0;

    static TrustedRegion make(double w, double m, int n) {
        if (!(w > 0.0) || !(m >= 0.0) || n < 1)
            throw InvalidInputError("TrustedRegion: need w > 0, m >= 0, n >= 1");
        return TrustedRegion{w, m, n, m + std::sqrt(double(n)) * w};
    }
};

inline BinKey bin_key(std::span<const double> x, double w) {
    if (!(w > 0.0)) throw InvalidInputError("bin_key: w must be positive");
    BinKey key;
    key.coords.reserve(x.size());
    for (double xi : x) {
        if (!std::isfinite(xi)) throw InvalidInputError("bin_key: non-finite coordinate");
        double q = std::floor(xi / w);
        if (std::abs(q) > 9.0e18) throw InvalidInputError("bin_key: coordinate too large for lattice index");
        key.coords.push_back(static_cast<std::int64_t>(q));
    }
    return key;
}

// Closest point of the closed cube to the origin: clamp 0 into [k_i w, (k_i + 1) w]
// per coordinate.
inline InputPoint nearest_point_to_origin(const BinKey& key, double w) {
    if (!(w > 0.0)) throw InvalidInputError("nearest_point_to_origin: w must be positive");
    InputPoint p;
    p.reserve(key.coords.size());
    for (std::int64_t k : key.coords) {
        double lo = double(k) * w;
        double hi = double(k + 1) * w;
        p.push_back(std::max(lo, std::min(0.0, hi)));
    }
    return p;
}

inline bool is_trusted(const BinKey& key, const TrustedRegion& region) {
    if (static_cast<int>(key.coords.size()) != region.n)
        throw InvalidInputError("is_trusted: dimension mismatch");
    return l2_norm(nearest_point_to_origin(key, region.w)) <= region.m;
}

// Materializes the trusted set by scanning the bounding box of candidate keys.
// Intended for small n; throws rather than attempt more than cap keys.
inline std::vector<BinKey> enumerate_trusted_bins(const TrustedRegion& region,
                                                  std::uint64_t cap = 10'000'000) {
    const std::int64_t kmax = static_cast<std::int64_t>(std::ceil(region.m / region.w));
    const std::int64_t kmin = -kmax - 1;
    const std::uint64_t side = static_cast<std::uint64_t>(kmax - kmin + 1);
    std::uint64_t total = 1;
    for (int i = 0; i < region.n; ++i) {
        if (total > cap / side) throw EnumerationTooLargeError("enumerate_trusted_bins: candidate box exceeds cap");
        total *= side;
    }
    std::vector<BinKey> out;
    BinKey key;
    key.coords.assign(region.n, kmin);
    while (true) {
        if (is_trusted(key, region)) out.push_back(key);
        int axis = 0;
        while (axis < region.n && ++key.coords[axis] > kmax) {
            key.coords[axis] = kmin;
            ++axis;
        }
        if (axis == region.n) break;
    }
    return out;
}

// Volume of the n-dimensional unit ball, pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    if (n < 1) throw InvalidInputError("unit_ball_volume: n must be >= 1");
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace riskab

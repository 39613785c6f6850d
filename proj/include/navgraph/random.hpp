#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "navgraph/metric.hpp"

namespace navgraph {

/// SplitMix64 finalizer: a bijective 64-bit mix.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) drawn from stream `seed` at position `index`.
/// Each index gets its own value, so per-vertex draws do not depend on
/// evaluation order.
inline double unit_draw(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// n points uniform in [0, side)^d; duplicates are redrawn.
inline std::vector<Coords> uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed, double side = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<Coords> out;
    out.reserve(n);
    while (out.size() < n) {
        Coords p(dim);
        for (double& c : p) c = coord(rng);
        bool duplicate = false;
        for (const Coords& o : out) {
            if (o == p) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.push_back(std::move(p));
    }
    return out;
}

/// For each of `count` data points (cycled in index order), a copy with each
/// coordinate shifted uniformly in [-noise, noise].
inline std::vector<Coords> perturbed_points(const std::vector<Coords>& points, std::size_t count, double noise,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shift(-noise, noise);
    std::vector<Coords> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count && !points.empty(); ++k) {
        Coords p = points[k % points.size()];
        for (double& c : p) c += shift(rng);
        out.push_back(std::move(p));
    }
    return out;
}

/// The standard query set: P itself, `random_count` uniform points over the
/// bounding box of P, and `perturbed_count` data points jittered by
/// eps * d_min.
inline std::vector<Coords> query_protocol(const std::vector<Coords>& points, double epsilon, double dmin,
                                          std::size_t random_count, std::size_t perturbed_count,
                                          std::uint64_t seed) {
    std::vector<Coords> out = points;
    if (points.empty()) return out;
    const std::size_t dim = points.front().size();
    Coords lo = points.front(), hi = points.front();
    for (const Coords& p : points) {
        for (std::size_t k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    std::mt19937_64 rng(splitmix64(seed));
    for (std::size_t r = 0; r < random_count; ++r) {
        Coords q(dim);
        for (std::size_t k = 0; k < dim; ++k) q[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
        out.push_back(std::move(q));
    }
    const auto jitter = perturbed_points(points, perturbed_count, epsilon * dmin, splitmix64(seed + 1));
    out.insert(out.end(), jitter.begin(), jitter.end());
    return out;
}

}  // namespace navgraph

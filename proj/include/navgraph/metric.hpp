#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace navgraph {

using Index = std::uint32_t;
using Coords = std::vector<double>;

/// A distance oracle over some element universe. Every metric carries a
/// uniform `scale` so that abstract spaces can be normalized without
/// touching their elements.
template <typename M>
concept Metric = requires(const M& m, const typename M::point_type& a) {
    typename M::point_type;
    { m.distance(a, a) } -> std::convertible_to<double>;
};

template <typename M>
using PointSet = std::vector<typename M::point_type>;

enum class MetricKind { euclidean_l2, euclidean_linf, tree, adversarial_block };

inline const char* to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::euclidean_l2: return "euclidean-L2";
    case MetricKind::euclidean_linf: return "euclidean-Linf";
    case MetricKind::tree: return "tree-metric";
    case MetricKind::adversarial_block: return "adversarial-block";
    }
    return "unknown";
}

namespace detail {

inline void check_dims(const Coords& a, const Coords& b, std::size_t dim) {
    if (a.size() != dim || b.size() != dim) {
        throw std::domain_error("point dimension does not match the space dimension " +
                                std::to_string(dim));
    }
}

}  // namespace detail

/// (R^d, L2).
struct EuclideanL2 {
    using point_type = Coords;
    static constexpr MetricKind kind = MetricKind::euclidean_l2;

    std::size_t dim = 2;
    double scale = 1.0;
    std::optional<double> doubling_dim{};

    double distance(const Coords& a, const Coords& b) const {
        detail::check_dims(a, b, dim);
        double sum = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = a[k] - b[k];
            sum += diff * diff;
        }
        return scale * std::sqrt(sum);
    }
};

/// (R^d, L-infinity).
struct EuclideanLinf {
    using point_type = Coords;
    static constexpr MetricKind kind = MetricKind::euclidean_linf;

    std::size_t dim = 2;
    double scale = 1.0;
    std::optional<double> doubling_dim{};

    double distance(const Coords& a, const Coords& b) const {
        detail::check_dims(a, b, dim);
        double best = 0.0;
        for (std::size_t k = 0; k < dim; ++k) best = std::max(best, std::abs(a[k] - b[k]));
        return scale * best;
    }
};

/// Leaves of a complete binary tree with `leaf_count` leaves (a power of 2).
/// The edge above a leaf weighs 1 and the edge above an internal node v weighs
/// 2^(level(v)-1), so two leaves whose lowest common ancestor sits at level l
/// are 2^l apart. The tree is never materialized: the LCA level of leaves a
/// and b is the bit width of a xor b.
struct TreeMetric {
    using point_type = std::uint64_t;
    static constexpr MetricKind kind = MetricKind::tree;

    std::uint64_t leaf_count = 2;
    double scale = 1.0;
    std::optional<double> doubling_dim = 1.0;

    static int lca_level(std::uint64_t a, std::uint64_t b) {
        return static_cast<int>(std::bit_width(a ^ b));
    }

    double distance(std::uint64_t a, std::uint64_t b) const {
        if (a >= leaf_count || b >= leaf_count) {
            throw std::domain_error("leaf id out of range [0, " + std::to_string(leaf_count) + ")");
        }
        if (a == b) return 0.0;
        return scale * std::ldexp(1.0, lca_level(a, b));
    }
};

template <typename M>
concept CoordinateMetric = Metric<M> && std::same_as<typename M::point_type, Coords>;

/// Distance between two points of a space.
template <Metric M>
double distance(const M& space, const typename M::point_type& a, const typename M::point_type& b) {
    return space.distance(a, b);
}

struct Neighbor {
    Index index = 0;
    double distance = 0.0;
};

/// Exact nearest neighbor of q in P; ties go to the smallest index.
template <Metric M>
Neighbor brute_force_nn(const M& space, const PointSet<M>& points,
                        const typename M::point_type& q) {
    if (points.empty()) throw std::domain_error("brute_force_nn: empty point set");
    Neighbor best{0, space.distance(points[0], q)};
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = space.distance(points[i], q);
        if (d < best.distance) best = {static_cast<Index>(i), d};
    }
    return best;
}

/// Distances from q to every point of P, in index order.
template <Metric M>
std::vector<double> distances_to(const M& space, const PointSet<M>& points,
                                 const typename M::point_type& q) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = space.distance(points[i], q);
    return out;
}

struct ExtremeEstimate {
    double dmin_hat = 0.0;
    double dmax_hat = 0.0;
    double delta_hat = 0.0;
};

struct Extremes {
    double dmin = 0.0;
    double dmax = 0.0;
    double aspect_ratio() const { return dmax / dmin; }
};

/// Exact minimum and maximum inter-point distances by exhaustive pairing.
template <Metric M>
Extremes exact_extremes(const M& space, const PointSet<M>& points) {
    if (points.size() < 2) throw std::domain_error("exact_extremes: need at least 2 points");
    Extremes e{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = space.distance(points[i], points[j]);
            e.dmin = std::min(e.dmin, d);
            e.dmax = std::max(e.dmax, d);
        }
    }
    return e;
}

/// dmax_hat is twice the eccentricity of point 0; dmin_hat is half of the
/// smallest nearest-neighbor distance. Brute-force NN stands in for the
/// 2-ANN structure, so dmin_hat is exactly d_min / 2.
template <Metric M>
ExtremeEstimate estimate_extremes(const M& space, const PointSet<M>& points) {
    if (points.size() < 2) throw std::domain_error("estimate_extremes: need at least 2 points");
    double ecc = 0.0;
    for (std::size_t j = 1; j < points.size(); ++j) {
        ecc = std::max(ecc, space.distance(points[0], points[j]));
    }
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            smallest = std::min(smallest, space.distance(points[i], points[j]));
        }
    }
    ExtremeEstimate e;
    e.dmax_hat = 2.0 * ecc;
    e.dmin_hat = smallest / 2.0;
    e.delta_hat = e.dmax_hat / e.dmin_hat;
    return e;
}

template <typename P>
struct TriangleViolation {
    P a{}, b{}, c{};
    double ab = 0.0, ac = 0.0, bc = 0.0;
};

/// Exhaustive triangle-inequality check over P plus an optional extra
/// element. Returns the first triple with D(a,b) > D(a,c) + D(c,b).
template <Metric M>
std::optional<TriangleViolation<typename M::point_type>> verify_triangle(
    const M& space, const PointSet<M>& points,
    const std::optional<typename M::point_type>& extra = std::nullopt) {
    PointSet<M> all = points;
    if (extra) all.push_back(*extra);
    const std::size_t n = all.size();
    std::vector<double> table(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) table[i * n + j] = space.distance(all[i], all[j]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const double ij = table[i * n + j];
                const double ik = table[i * n + k];
                const double kj = table[k * n + j];
                if (ij > ik + kj) return TriangleViolation<typename M::point_type>{all[i], all[j], all[k], ij, ik, kj};
            }
        }
    }
    return std::nullopt;
}

}  // namespace navgraph

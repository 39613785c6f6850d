#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/search.hpp"

namespace navgraph {

// ---------------------------------------------------------------------------
// Tree instance

/// Leaves of a complete binary tree with 2 * delta leaves. `subtree` holds the
/// n leaves under the level-log2(n) node of the leftmost root-to-leaf path;
/// `path` holds one leaf (the leftmost) from the right subtree T_i of each
/// upper path node, floor(h/2) of them. Points are the subtree leaves in
/// order followed by the path leaves by increasing level.
struct TreeInstance {
    std::uint64_t n = 0;
    std::uint64_t delta = 0;
    int h = 0;  // log2(2 delta)
    TreeMetric space;
    std::vector<std::uint64_t> points;
    std::vector<Index> subtree;  // indices into points
    std::vector<Index> path;     // indices into points
    std::vector<int> path_levels;
};

namespace detail {

inline bool is_power_of_two(std::uint64_t x) { return x != 0 && std::has_single_bit(x); }

}  // namespace detail

inline TreeInstance gen_tree_instance(std::uint64_t n, std::uint64_t delta) {
    if (!detail::is_power_of_two(n)) throw std::domain_error("tree instance: n must be a power of 2");
    if (!detail::is_power_of_two(delta)) throw std::domain_error("tree instance: delta must be a power of 2");
    if (n < 2) throw std::domain_error("tree instance: n >= 2 is violated");
    if (delta > (std::uint64_t{1} << 40)) throw std::domain_error("tree instance: delta above 2^40 is not supported");
    const int log_n = std::countr_zero(n);
    const int h = std::countr_zero(delta) + 1;
    if (2 * log_n > h) throw std::domain_error("tree instance: n^2 <= 2 delta is violated");
    if (h > static_cast<int>(std::min<std::uint64_t>(n, 64))) {
        throw std::domain_error("tree instance: 2 delta <= 2^n is violated");
    }
    TreeInstance inst;
    inst.n = n;
    inst.delta = delta;
    inst.h = h;
    inst.space.leaf_count = 2 * delta;
    for (std::uint64_t leaf = 0; leaf < n; ++leaf) {
        inst.subtree.push_back(static_cast<Index>(inst.points.size()));
        inst.points.push_back(leaf);
    }
    for (int i = (h + 1) / 2 + 1; i <= h; ++i) {
        inst.path.push_back(static_cast<Index>(inst.points.size()));
        inst.path_levels.push_back(i);
        inst.points.push_back(std::uint64_t{1} << (i - 1));
    }
    return inst;
}

template <typename P>
struct ForcedEdgeWitness {
    Index from = 0;
    Index to = 0;
    P query{};
    std::string reason;
};

template <typename P>
struct ForcedEdgeReport {
    std::size_t pairs_checked = 0;
    std::size_t certified = 0;
    std::vector<ForcedEdgeWitness<P>> failures;

    bool all_certified() const { return failures.empty() && certified == pairs_checked; }
};

namespace detail {

/// In the complete graph minus (from, to): greedy from `from` toward q does
/// not move, `from` is not a (1+eps)-ANN of q, and with the edge restored
/// greedy hops straight to `to`.
template <Metric M>
std::optional<std::string> certify_forced(ProximityGraph& complete, const M& space, const PointSet<M>& points,
                                          Index from, Index to, const typename M::point_type& q, double epsilon) {
    const Neighbor nn = brute_force_nn(space, points, q);
    const double d_from = space.distance(points[from], q);
    if (is_approx_nn(d_from, nn.distance, epsilon)) return "source is already a (1+eps)-ANN of q";
    complete.remove_edge(from, to);
    const SearchTrace stuck = greedy_search(complete, space, points, from, q);
    bool still_stuck = stuck.hops.size() == 1;
    for (Index v : complete.out(from)) {
        if (space.distance(points[v], q) < d_from) still_stuck = false;
    }
    complete.add_edge(from, to);
    if (!still_stuck) return "an out-neighbor other than the target is closer to q";
    const SearchTrace direct = greedy_search(complete, space, points, from, q);
    if (direct.hops.size() < 2 || direct.hops[1].vertex != to) return "restored edge is not taken first";
    return std::nullopt;
}

}  // namespace detail

/// For every (v1, v2) with v1 a subtree leaf and v2 a path leaf: with q = v2
/// and the edge (v1, v2) missing from the complete graph, v1 is stuck while
/// not a 2-ANN of q.
inline ForcedEdgeReport<std::uint64_t> verify_forced_edges_tree(const TreeInstance& inst) {
    ForcedEdgeReport<std::uint64_t> report;
    ProximityGraph complete = ProximityGraph::complete(inst.points.size());
    for (Index v1 : inst.subtree) {
        for (Index v2 : inst.path) {
            ++report.pairs_checked;
            const std::uint64_t q = inst.points[v2];
            if (auto why = detail::certify_forced(complete, inst.space, inst.points, v1, v2, q, 1.0)) {
                report.failures.push_back({v1, v2, q, *why});
            } else {
                ++report.certified;
            }
        }
    }
    return report;
}

struct DoublingReport {
    std::size_t balls_checked = 0;
    std::size_t max_cover = 0;  // most half-radius balls any witness used
    std::optional<std::string> failure;

    bool passed() const { return !failure.has_value(); }
};

/// Samples (center, r) pairs over P plus `extra_leaves` random leaves and
/// covers each ball with at most 2 balls of radius r/2 built from the two
/// children of the center's level-l ancestor, l = log2 of the largest power
/// of 2 in [2, 2 delta] not above r. Every member of the sampled universe in
/// the ball is checked against the cover.
inline DoublingReport check_tree_doubling(const TreeInstance& inst, std::size_t samples, std::uint64_t seed,
                                          std::size_t extra_leaves = 64) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> universe = inst.points;
    std::uniform_int_distribution<std::uint64_t> any_leaf(0, inst.space.leaf_count - 1);
    for (std::size_t k = 0; k < extra_leaves; ++k) universe.push_back(any_leaf(rng));
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
    std::uniform_real_distribution<double> log_radius(-1.0, static_cast<double>(inst.h) + 1.0);
    DoublingReport report;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::uint64_t p = universe[pick(rng)];
        double r = std::exp2(log_radius(rng));
        if (s % 4 == 0) r = std::ldexp(1.0, static_cast<int>(s / 4) % (inst.h + 2));  // exact powers of 2, incl. 1
        std::vector<std::uint64_t> centers;
        if (r < 2.0) {
            centers.push_back(p);
        } else {
            int level = std::min(inst.h, static_cast<int>(std::floor(std::log2(r))));
            while (std::ldexp(1.0, level) > r) --level;
            while (level + 1 <= inst.h && std::ldexp(1.0, level + 1) <= r) ++level;
            const std::uint64_t base = (p >> level) << level;  // leftmost leaf under the ancestor
            centers.push_back(base);
            centers.push_back(base + (std::uint64_t{1} << (level - 1)));
        }
        ++report.balls_checked;
        report.max_cover = std::max(report.max_cover, centers.size());
        for (std::uint64_t x : universe) {
            if (inst.space.distance(p, x) > r) continue;
            bool covered = false;
            for (std::uint64_t c : centers)
                if (inst.space.distance(c, x) <= r / 2.0) covered = true;
            if (!covered) {
                report.failure = "leaf " + std::to_string(x) + " of B(" + std::to_string(p) + ", " +
                                 std::to_string(r) + ") is not covered";
                return report;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Block instance

/// P = union of t translated copies of {0..s-1}^d with offsets i * 2s on the
/// first coordinate, plus the non-Euclidean query element q. Elements are
/// addressed by index: [0, n) are data points, n is q. Distances depend on
/// the chosen p*.
struct BlockMetric {
    using point_type = std::size_t;
    static constexpr MetricKind kind = MetricKind::adversarial_block;

    const std::vector<Coords>* coords = nullptr;
    std::size_t s = 2;
    std::size_t block_size = 1;  // s^d
    std::size_t p_star = 0;
    double scale = 1.0;
    std::optional<double> doubling_dim{};

    std::size_t n() const { return coords->size(); }
    std::size_t query() const { return n(); }
    std::size_t block_of(std::size_t p) const { return p / block_size; }
    /// The block origin w of block b is the first point of the block.
    std::size_t origin_of(std::size_t block) const { return block * block_size; }

    static double linf(const Coords& a, const Coords& b) {
        double m = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
        return m;
    }

    double raw(std::size_t a, std::size_t b) const {
        const std::size_t q = query();
        if (a > q || b > q) throw std::domain_error("block metric: element out of range");
        if (a == b) return 0.0;
        if (a == q) std::swap(a, b);
        if (b != q) return linf((*coords)[a], (*coords)[b]);
        const std::size_t star_block = block_of(p_star);
        if (a == p_star) return static_cast<double>(s) - 1.0;
        if (block_of(a) == star_block) return static_cast<double>(s);
        return linf((*coords)[a], (*coords)[origin_of(star_block)]);
    }

    double distance(std::size_t a, std::size_t b) const { return scale * raw(a, b); }
};

struct BlockInstance {
    std::size_t s = 2, t = 1, d = 1;
    std::size_t n = 0;
    std::size_t block_size = 1;
    double epsilon = 0.25;  // 1 / (2s)
    std::vector<Coords> coords;
    std::vector<std::size_t> points;  // 0..n-1, the data indices under BlockMetric

    /// D_{p*} for the given data index.
    BlockMetric metric_for(std::size_t p_star) const {
        if (p_star >= n) throw std::domain_error("block instance: p* out of range");
        BlockMetric m;
        m.coords = &coords;
        m.s = s;
        m.block_size = block_size;
        m.p_star = p_star;
        m.doubling_dim = std::log2(1.0 + std::ldexp(1.0, static_cast<int>(d)));
        return m;
    }

    Coords block_offset(std::size_t block) const {
        Coords w(d, 0.0);
        w[0] = static_cast<double>(block * 2 * s);
        return w;
    }
};

inline constexpr std::size_t kBlockInstanceCap = 1 << 16;

inline BlockInstance gen_block_instance(std::size_t s, std::size_t t, std::size_t d,
                                        std::size_t cap = kBlockInstanceCap) {
    if (s < 2) throw std::domain_error("block instance: s >= 2 is violated");
    if (t < 1) throw std::domain_error("block instance: t >= 1 is violated");
    if (d < 1) throw std::domain_error("block instance: d >= 1 is violated");
    std::size_t block = 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (block > cap / s) throw std::domain_error("block instance: s^d * t exceeds the size cap " + std::to_string(cap));
        block *= s;
    }
    if (block > cap / t) throw std::domain_error("block instance: s^d * t exceeds the size cap " + std::to_string(cap));
    BlockInstance inst;
    inst.s = s;
    inst.t = t;
    inst.d = d;
    inst.block_size = block;
    inst.n = block * t;
    inst.epsilon = 1.0 / (2.0 * static_cast<double>(s));
    inst.coords.reserve(inst.n);
    for (std::size_t b = 0; b < t; ++b) {
        const Coords w = inst.block_offset(b);
        for (std::size_t k = 0; k < block; ++k) {
            Coords p(d);
            std::size_t rest = k;
            for (std::size_t axis = d; axis-- > 0;) {
                p[axis] = w[axis] + static_cast<double>(rest % s);
                rest /= s;
            }
            inst.coords.push_back(std::move(p));
        }
    }
    inst.points.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) inst.points[i] = i;
    return inst;
}

/// For every ordered pair (p1, p2) of distinct points in one block, under
/// D_{p2}: p1 is not a (1+eps)-ANN of q, and p1 is stuck in the complete
/// graph minus (p1, p2).
inline ForcedEdgeReport<std::size_t> verify_forced_edges_blocks(const BlockInstance& inst) {
    ForcedEdgeReport<std::size_t> report;
    ProximityGraph complete = ProximityGraph::complete(inst.n);
    for (std::size_t b = 0; b < inst.t; ++b) {
        const std::size_t lo = b * inst.block_size;
        const std::size_t hi = lo + inst.block_size;
        for (std::size_t p1 = lo; p1 < hi; ++p1) {
            for (std::size_t p2 = lo; p2 < hi; ++p2) {
                if (p1 == p2) continue;
                ++report.pairs_checked;
                const BlockMetric metric = inst.metric_for(p2);
                const auto from = static_cast<Index>(p1);
                const auto to = static_cast<Index>(p2);
                if (auto why = detail::certify_forced(complete, metric, inst.points, from, to, metric.query(),
                                                      inst.epsilon)) {
                    report.failures.push_back({from, to, metric.query(), *why});
                } else {
                    ++report.certified;
                }
            }
        }
    }
    return report;
}

/// Exhaustive triangle check of D_{p*} over P and q for every p*. Returns
/// the first failing p*, if any.
inline std::optional<std::size_t> verify_block_triangles(const BlockInstance& inst) {
    for (std::size_t p_star = 0; p_star < inst.n; ++p_star) {
        const BlockMetric metric = inst.metric_for(p_star);
        if (verify_triangle(metric, inst.points, std::optional<std::size_t>(metric.query()))) return p_star;
    }
    return std::nullopt;
}

/// Samples balls of D_{p*} (center in P or q) and covers each with at most
/// 1 + 2^d half-radius pieces: the 2^d axis-aligned sub-cubes of side r
/// around the center (L-infinity balls of radius r/2 centered at
/// center +- r/2 per axis), plus the ball B(q, r/2) when q is in the ball.
/// Centers equal to q with r < s - 1 use {q}; with s - 1 <= r < s, {q, p*};
/// otherwise the cover of the block origin w* is used. Every element of the
/// ball is checked against the cover.
inline DoublingReport check_block_doubling(const BlockInstance& inst, std::size_t p_star, std::size_t samples,
                                           std::uint64_t seed) {
    const BlockMetric metric = inst.metric_for(p_star);
    const std::size_t q = metric.query();
    const std::size_t cubes = std::size_t{1} << inst.d;
    const double span = 2.0 * static_cast<double>(inst.s * inst.t) + 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, inst.n);  // n picks q
    std::uniform_real_distribution<double> radius(0.0, span);
    DoublingReport report;
    for (std::size_t sample = 0; sample < samples; ++sample) {
        const std::size_t center = pick(rng);
        double r = radius(rng);
        if (sample % 2 == 0) r = std::floor(r);
        if (sample % 7 == 0) r = static_cast<double>(inst.s) - 1.0;

        // Cover pieces: sub-cubes (anchor index, orthant mask) of side r, and
        // half-radius balls of (M, D_{p*}).
        std::vector<std::pair<std::size_t, std::size_t>> sub_cubes;
        std::vector<std::size_t> ball_centers;
        const auto add_cubes = [&](std::size_t anchor) {
            for (std::size_t mask = 0; mask < cubes; ++mask) sub_cubes.emplace_back(anchor, mask);
        };
        const auto in_cube = [&](std::size_t x, std::size_t anchor, std::size_t mask) {
            for (std::size_t axis = 0; axis < inst.d; ++axis) {
                const double lo = inst.coords[anchor][axis];
                const double v = inst.coords[x][axis];
                const bool upper = ((mask >> axis) & 1U) != 0;
                if (upper ? !(v >= lo && v - lo <= r) : !(v <= lo && lo - v <= r)) return false;
            }
            return true;
        };
        if (center == q) {
            if (r < static_cast<double>(inst.s) - 1.0) {
                ball_centers.push_back(q);
            } else if (r < static_cast<double>(inst.s)) {
                ball_centers.push_back(q);
                ball_centers.push_back(p_star);
            } else {
                add_cubes(metric.origin_of(metric.block_of(p_star)));
                ball_centers.push_back(q);
            }
        } else {
            add_cubes(center);
            if (metric.raw(center, q) <= r) ball_centers.push_back(q);
        }
        const std::size_t used = sub_cubes.size() + ball_centers.size();
        ++report.balls_checked;
        report.max_cover = std::max(report.max_cover, used);
        if (used > cubes + 1) {
            report.failure = "cover uses " + std::to_string(used) + " pieces";
            return report;
        }
        for (std::size_t x = 0; x <= inst.n; ++x) {
            if (metric.raw(center, x) > r) continue;
            bool covered = false;
            for (std::size_t c : ball_centers)
                if (metric.raw(c, x) <= r / 2.0) covered = true;
            if (!covered && x != q) {
                for (const auto& [anchor, mask] : sub_cubes)
                    if (in_cube(x, anchor, mask)) covered = true;
            }
            if (!covered) {
                report.failure = "element " + std::to_string(x) + " of B(" + std::to_string(center) + ", " +
                                 std::to_string(r) + ") under p* = " + std::to_string(p_star) + " is not covered";
                return report;
            }
        }
    }
    return report;
}

}  // namespace navgraph

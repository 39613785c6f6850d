#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/dynamic_ann.hpp"
#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/nets.hpp"
#include "navgraph/parallel.hpp"

namespace navgraph {

/// Edge-rule parameters: eta = ceil(log2(1 + 2/eps)), phi = 1 + 2^(eta+1).
struct PGParams {
    double epsilon = 1.0;
    int eta = 2;
    double phi = 9.0;
    int h = 0;

    /// Level-i edges reach at most this far.
    double reach(int level) const { return phi * std::ldexp(1.0, level); }
};

inline PGParams pg_params(double epsilon, int h) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::domain_error("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
    }
    PGParams params;
    params.epsilon = epsilon;
    params.eta = ceil_log2(1.0 + 2.0 / epsilon);
    params.phi = 1.0 + std::ldexp(1.0, params.eta + 1);
    params.h = h;
    return params;
}

inline PGParams pg_params(double epsilon, const NetHierarchy& hierarchy) {
    return pg_params(epsilon, hierarchy.h);
}

/// G_net together with what produced it. level_neighbors[p][i] holds the
/// level-i targets of p, ascending; the graph is their union.
struct NetPG {
    ProximityGraph graph;
    NetHierarchy hierarchy;
    PGParams params;
    std::vector<std::vector<std::vector<Index>>> level_neighbors;
    std::size_t max_deleted = 0;  // largest S_del seen by the accelerated build
};

template <Metric M>
struct Normalized {
    M space;
    PointSet<M> points;
    double scale = 1.0;
};

/// Scales uniformly so the smallest inter-point distance becomes 2.
/// Coordinate spaces scale their points; abstract spaces scale the metric.
template <Metric M>
Normalized<M> normalize(const M& space, const PointSet<M>& points) {
    if (points.size() < 2) throw std::domain_error("normalize: need at least 2 points");
    const Extremes e = exact_extremes(space, points);
    if (!(e.dmin > 0.0)) throw std::domain_error("normalize: duplicate points in P");
    Normalized<M> out{space, points, 2.0 / e.dmin};
    if (out.scale == 1.0) return out;
    if constexpr (CoordinateMetric<M>) {
        for (auto& p : out.points)
            for (double& c : p) c *= out.scale;
    } else {
        out.space.scale *= out.scale;
    }
    return out;
}

namespace detail {

inline ProximityGraph union_levels(const std::vector<std::vector<std::vector<Index>>>& levels) {
    std::vector<std::vector<Index>> lists(levels.size());
    for (std::size_t p = 0; p < levels.size(); ++p) {
        for (const auto& level : levels[p]) lists[p].insert(lists[p].end(), level.begin(), level.end());
    }
    return ProximityGraph::from_lists(std::move(lists), Provenance::net);
}

}  // namespace detail

/// Scans every net member at every level: edge (p, y) for each y in Y_i with
/// D(p, y) <= phi * 2^i and y != p.
template <Metric M>
NetPG build_net_pg_naive(const M& space, const PointSet<M>& points, double epsilon, unsigned threads = 1) {
    NetPG out;
    out.hierarchy = build_net_hierarchy(space, points);
    out.params = pg_params(epsilon, out.hierarchy);
    const std::size_t n = points.size();
    out.level_neighbors.assign(n, std::vector<std::vector<Index>>(out.hierarchy.levels.size()));
    parallel_for(n, threads, [&](std::size_t p) {
        for (int i = 0; i <= out.hierarchy.h; ++i) {
            const double reach = out.params.reach(i);
            auto& targets = out.level_neighbors[p][static_cast<std::size_t>(i)];
            for (Index y : out.hierarchy.levels[static_cast<std::size_t>(i)].members) {
                if (y != p && space.distance(points[p], points[y]) <= reach) targets.push_back(y);
            }
        }
    });
    out.graph = detail::union_levels(out.level_neighbors);
    return out;
}

struct BallCollection {
    std::vector<Index> within;  // members with D(p, y) <= threshold, ascending
    std::size_t deleted = 0;    // |S_del|: members pulled from the helper
};

/// Collects {y : D(p, y) <= threshold} by repeatedly extracting a 2-ANN of
/// p from the helper and deleting it, stopping at the first extracted point
/// beyond 2 * threshold. Every deleted point is re-inserted before returning.
template <Metric M>
BallCollection collect_ball(DynamicAnnHelper<M>& helper, const typename M::point_type& p, double threshold) {
    thread_local std::vector<Neighbor> removed;
    removed.clear();
    while (auto y = helper.extract(p)) {
        removed.push_back(*y);
        if (y->distance > 2.0 * threshold) break;
    }
    BallCollection out;
    out.deleted = removed.size();
    thread_local std::vector<std::uint64_t> marks;
    std::size_t count = 0;
    for (const Neighbor& y : removed) {
        helper.insert(y.index);
        if (y.distance > threshold) continue;
        if (marks.size() <= y.index / 64) marks.resize(y.index / 64 + 1, 0);
        marks[y.index / 64] |= std::uint64_t{1} << (y.index % 64);
        ++count;
    }
    out.within.reserve(count);
    for (std::size_t w = 0; w < marks.size() && out.within.size() < count; ++w) {
        for (std::uint64_t bits = marks[w]; bits != 0; bits &= bits - 1) {
            out.within.push_back(static_cast<Index>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        }
        marks[w] = 0;
    }
    return out;
}

/// Same output as greedy_r_net. The separation test for each candidate asks
/// the helper, which holds the members accepted so far, for a 2-ANN and
/// falls back to collect_ball only when the answer is inconclusive.
template <Metric M>
Net greedy_r_net_fast(DynamicAnnHelper<M>& helper, const M& space, const PointSet<M>& points, double r) {
    if (!(r > 0.0)) throw std::domain_error("greedy_r_net: radius must be positive");
    if (!helper.empty()) throw std::domain_error("greedy_r_net_fast: helper must start empty");
    Net net{r, {}};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& x = points[i];
        bool separated = true;
        if (auto y = helper.approx_nearest(x); y && y->distance < 2.0 * r) {
            if (y->distance < r) {
                separated = false;
            } else {
                for (Index m : collect_ball(helper, x, r).within) {
                    if (space.distance(points[m], x) < r) {
                        separated = false;
                        break;
                    }
                }
            }
        }
        if (separated) {
            net.members.push_back(static_cast<Index>(i));
            helper.insert(static_cast<Index>(i));
        }
    }
    helper.clear();
    return net;
}

/// Same output as build_net_hierarchy, with every level built by
/// greedy_r_net_fast over one shared helper.
template <Metric M>
NetHierarchy build_net_hierarchy_fast(const M& space, const PointSet<M>& points) {
    const ExtremeEstimate est = require_normalized(space, points);
    NetHierarchy hierarchy;
    hierarchy.h = std::max(0, ceil_log2(est.dmax_hat));
    hierarchy.levels.reserve(static_cast<std::size_t>(hierarchy.h) + 1);
    std::vector<Index> all(points.size());
    for (Index i = 0; i < all.size(); ++i) all[i] = i;
    DynamicAnnHelper<M> helper(space, points, all, true);
    for (int i = 0; i <= hierarchy.h; ++i) {
        hierarchy.levels.push_back(greedy_r_net_fast(helper, space, points, hierarchy.radius(i)));
    }
    return hierarchy;
}

/// The build procedure: per level, a dynamic 2-ANN helper over Y_i answers
/// each point's ball query. Output is identical to build_net_pg_naive.
template <Metric M>
NetPG build_net_pg_fast(const M& space, const PointSet<M>& points, double epsilon) {
    NetPG out;
    out.hierarchy = build_net_hierarchy_fast(space, points);
    out.params = pg_params(epsilon, out.hierarchy);
    const std::size_t n = points.size();
    out.level_neighbors.assign(n, std::vector<std::vector<Index>>(out.hierarchy.levels.size()));
    for (int i = 0; i <= out.hierarchy.h; ++i) {
        const auto& members = out.hierarchy.levels[static_cast<std::size_t>(i)].members;
        DynamicAnnHelper<M> helper(space, points, members);
        const double reach = out.params.reach(i);
        for (std::size_t p = 0; p < n; ++p) {
            BallCollection ball = collect_ball(helper, points[p], reach);
            out.max_deleted = std::max(out.max_deleted, ball.deleted);
            auto& targets = out.level_neighbors[p][static_cast<std::size_t>(i)];
            for (Index y : ball.within)
                if (y != p) targets.push_back(y);
        }
    }
    out.graph = detail::union_levels(out.level_neighbors);
    return out;
}

struct EdgeStructureViolation {
    Index vertex = 0;
    int level = 0;
    std::string what;
};

/// Re-derives the edge rule for every vertex and level: level-i targets lie
/// in Y_i, within phi * 2^i of p, pairwise at least 2^i apart; the graph is
/// exactly their union; every out-degree is at least 1.
template <Metric M>
std::optional<EdgeStructureViolation> check_edge_structure(const M& space, const PointSet<M>& points,
                                                           const NetPG& pg) {
    const std::size_t n = points.size();
    if (pg.graph.size() != n || pg.level_neighbors.size() != n) {
        return EdgeStructureViolation{0, 0, "size mismatch"};
    }
    for (Index p = 0; p < n; ++p) {
        std::vector<Index> all;
        for (int i = 0; i <= pg.hierarchy.h; ++i) {
            const auto& targets = pg.level_neighbors[p][static_cast<std::size_t>(i)];
            const auto& members = pg.hierarchy.levels[static_cast<std::size_t>(i)].members;
            const double radius = pg.hierarchy.radius(i);
            for (std::size_t a = 0; a < targets.size(); ++a) {
                const Index y = targets[a];
                if (y == p) return EdgeStructureViolation{p, i, "self target"};
                if (!std::binary_search(members.begin(), members.end(), y)) {
                    return EdgeStructureViolation{p, i, "target " + std::to_string(y) + " not in the level net"};
                }
                if (space.distance(points[p], points[y]) > pg.params.reach(i)) {
                    return EdgeStructureViolation{p, i, "target " + std::to_string(y) + " beyond phi * 2^i"};
                }
                for (std::size_t b = a + 1; b < targets.size(); ++b) {
                    if (space.distance(points[y], points[targets[b]]) < radius) {
                        return EdgeStructureViolation{p, i, "targets closer than 2^i"};
                    }
                }
            }
            all.insert(all.end(), targets.begin(), targets.end());
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        const auto out = pg.graph.out(p);
        if (!std::equal(all.begin(), all.end(), out.begin(), out.end())) {
            return EdgeStructureViolation{p, -1, "graph differs from the union of level targets"};
        }
        if (out.empty()) return EdgeStructureViolation{p, -1, "out-degree 0"};
    }
    return std::nullopt;
}

}  // namespace navgraph

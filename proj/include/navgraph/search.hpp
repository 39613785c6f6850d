#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/nets.hpp"
#include "navgraph/parallel.hpp"

namespace navgraph {

struct Hop {
    Index vertex = 0;
    double distance = 0.0;  // D(vertex, q)
};

enum class Termination { self, budget };

/// The hop vertices visited by greedy, in order, with the number of distance
/// evaluations spent. The last hop is the returned vertex.
struct SearchTrace {
    std::vector<Hop> hops;
    std::uint64_t distance_computations = 0;
    Termination terminated = Termination::self;

    Index result() const { return hops.back().vertex; }
    double result_distance() const { return hops.back().distance; }
};

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

namespace detail {

/// Greedy routing with an optional budget on distance evaluations. A hop is
/// taken only after its full out-neighbor scan fits in the budget.
template <Metric M>
SearchTrace run_greedy(const ProximityGraph& graph, const M& space, const PointSet<M>& points,
                       Index start, const typename M::point_type& q, std::uint64_t budget) {
    if (start >= graph.size()) throw std::domain_error("greedy_search: start vertex out of range");
    if (graph.size() != points.size()) throw std::domain_error("greedy_search: graph/point count mismatch");
    SearchTrace trace;
    Hop current{start, space.distance(points[start], q)};
    trace.distance_computations = 1;
    trace.hops.push_back(current);
    for (;;) {
        const auto out = graph.out(current.vertex);
        if (trace.distance_computations + out.size() > budget) {
            trace.distance_computations = std::max<std::uint64_t>(trace.distance_computations, budget);
            trace.terminated = Termination::budget;
            return trace;
        }
        trace.distance_computations += out.size();
        std::optional<Hop> best;
        for (Index v : out) {
            const double d = space.distance(points[v], q);
            if (!best || d < best->distance) best = Hop{v, d};  // lists are sorted: ties keep the smaller index
        }
        if (!best || current.distance <= best->distance) {
            trace.terminated = Termination::self;
            return trace;
        }
        current = *best;
        trace.hops.push_back(current);
    }
}

}  // namespace detail

/// Greedy routing: hop to the out-neighbor closest to q until none is
/// strictly closer than the current vertex.
template <Metric M>
SearchTrace greedy_search(const ProximityGraph& graph, const M& space, const PointSet<M>& points,
                          Index start, const typename M::point_type& q) {
    return detail::run_greedy(graph, space, points, start, q, kUnlimitedBudget);
}

/// Greedy with a cap of `budget` distance evaluations. On exhaustion the
/// last hop vertex is returned.
template <Metric M>
Index budgeted_query(const ProximityGraph& graph, const M& space, const PointSet<M>& points,
                     Index start, const typename M::point_type& q, std::uint64_t budget) {
    if (budget < 1) throw std::domain_error("budgeted_query: budget must be >= 1");
    return detail::run_greedy(graph, space, points, start, q, budget).result();
}

template <Metric M>
SearchTrace budgeted_search(const ProximityGraph& graph, const M& space, const PointSet<M>& points,
                            Index start, const typename M::point_type& q, std::uint64_t budget) {
    if (budget < 1) throw std::domain_error("budgeted_query: budget must be >= 1");
    return detail::run_greedy(graph, space, points, start, q, budget);
}

/// True when d is within (1 + eps) of the exact nearest-neighbor distance.
inline bool is_approx_nn(double d, double nn_distance, double epsilon) {
    return d <= (1.0 + epsilon) * nn_distance;
}

struct NavigabilityWitness {
    Index vertex = 0;
    std::size_t query = 0;  // position in the query list
    double vertex_distance = 0.0;
    double nn_distance = 0.0;
    Index nn = 0;
};

struct NavigabilityReport {
    std::size_t pairs_checked = 0;
    std::optional<NavigabilityWitness> witness;  // first violation by (query, vertex) order

    bool passed() const { return !witness.has_value(); }
};

/// For every (p, q) in P x queries: p is a (1+eps)-ANN of q, or p has an
/// out-neighbor strictly closer to q.
template <Metric M>
NavigabilityReport check_navigable(const ProximityGraph& graph, const M& space, const PointSet<M>& points,
                                   double epsilon, const PointSet<M>& queries, unsigned threads = 1) {
    if (graph.size() != points.size()) throw std::domain_error("check_navigable: graph/point count mismatch");
    const std::size_t n = points.size();
    std::vector<std::optional<NavigabilityWitness>> per_query(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t qi) {
        const std::vector<double> dist = distances_to(space, points, queries[qi]);
        Index nn = 0;
        for (Index i = 1; i < n; ++i)
            if (dist[i] < dist[nn]) nn = i;
        const double nn_distance = dist[nn];
        for (Index p = 0; p < n; ++p) {
            if (is_approx_nn(dist[p], nn_distance, epsilon)) continue;
            bool improves = false;
            for (Index v : graph.out(p)) {
                if (dist[v] < dist[p]) {
                    improves = true;
                    break;
                }
            }
            if (!improves) {
                per_query[qi] = NavigabilityWitness{p, qi, dist[p], nn_distance, nn};
                return;
            }
        }
    });
    NavigabilityReport report;
    report.pairs_checked = n * queries.size();
    for (auto& w : per_query) {
        if (w) {
            report.witness = w;
            break;
        }
    }
    return report;
}

/// Position (0-based) of the first hop that is a (1+eps)-ANN, if any.
inline std::optional<std::size_t> first_approx_hop(const SearchTrace& trace, double nn_distance,
                                                   double epsilon) {
    for (std::size_t i = 0; i < trace.hops.size(); ++i) {
        if (is_approx_nn(trace.hops[i].distance, nn_distance, epsilon)) return i;
    }
    return std::nullopt;
}

/// Hop distances strictly decrease along a trace.
inline bool trace_is_monotone(const SearchTrace& trace) {
    for (std::size_t i = 1; i < trace.hops.size(); ++i) {
        if (!(trace.hops[i].distance < trace.hops[i - 1].distance)) return false;
    }
    return true;
}

struct LogDropViolation {
    std::size_t hop = 0;  // position of the earlier hop
    int before = 0;
    int after = 0;
};

/// Between consecutive hops that are both not (1+eps)-ANNs of q, the value
/// ceil(log2 D(hop, nn)) must strictly decrease.
template <Metric M>
std::optional<LogDropViolation> check_log_drop(const SearchTrace& trace, const M& space,
                                               const PointSet<M>& points, Index nn, double nn_distance,
                                               double epsilon) {
    for (std::size_t i = 0; i + 1 < trace.hops.size(); ++i) {
        const Hop& a = trace.hops[i];
        const Hop& b = trace.hops[i + 1];
        if (is_approx_nn(a.distance, nn_distance, epsilon) || is_approx_nn(b.distance, nn_distance, epsilon)) {
            continue;
        }
        const int before = ceil_log2(space.distance(points[a.vertex], points[nn]));
        const int after = ceil_log2(space.distance(points[b.vertex], points[nn]));
        if (!(after < before)) return LogDropViolation{i, before, after};
    }
    return std::nullopt;
}

}  // namespace navgraph

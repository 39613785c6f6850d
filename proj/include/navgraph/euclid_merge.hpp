#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/net_pg.hpp"
#include "navgraph/parallel.hpp"
#include "navgraph/random.hpp"
#include "navgraph/search.hpp"
#include "navgraph/theta.hpp"

namespace navgraph {

/// Sampling knobs. When `tau` is unset it resolves to min(1, z / log2 Delta).
struct SampleConfig {
    double z = 4.0;
    std::optional<double> tau{};
    std::uint64_t seed = 0;
    int repeats = 1;
};

/// min(1, z / log2 delta); also 1 whenever log2 delta <= z.
inline double sampling_rate(double z, double delta) {
    if (!(z > 0.0)) throw std::domain_error("sampling constant z must be positive");
    const double lg = std::log2(delta);
    if (!(lg > z)) return 1.0;
    return z / lg;
}

/// ceil(4 log2 n), at least 1.
inline int default_repeats(std::size_t n) {
    return std::max(1, static_cast<int>(std::ceil(4.0 * std::log2(static_cast<double>(std::max<std::size_t>(n, 2))))));
}

inline double resolve_tau(const SampleConfig& config, double delta) {
    const double tau = config.tau ? *config.tau : sampling_rate(config.z, delta);
    if (!(tau > 0.0 && tau <= 1.0)) throw std::domain_error("sampling rate tau must lie in (0, 1]");
    return tau;
}

struct JackpotSet {
    std::vector<char> flags;
    std::vector<Index> members;  // ascending

    std::size_t size() const { return members.size(); }
    bool contains(Index v) const { return v < flags.size() && flags[v] != 0; }
};

/// Vertex v is a jackpot when unit_draw(seed, v) < tau.
inline JackpotSet sample_jackpots(std::size_t n, double tau, std::uint64_t seed) {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::domain_error("sampling rate tau must lie in (0, 1]");
    JackpotSet out;
    out.flags.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (unit_draw(seed, v) < tau) {
            out.flags[v] = 1;
            out.members.push_back(static_cast<Index>(v));
        }
    }
    return out;
}

inline JackpotSet sample_jackpots(std::size_t n, const SampleConfig& config) {
    if (!config.tau) throw std::domain_error("sample_jackpots: config.tau is unresolved");
    return sample_jackpots(n, *config.tau, config.seed);
}

/// Keeps the out-edges of jackpot vertices and empties every other list.
inline ProximityGraph sparsify(const ProximityGraph& g_net, const JackpotSet& jackpots) {
    if (jackpots.flags.size() != g_net.size()) throw std::domain_error("sparsify: jackpot set size mismatch");
    ProximityGraph out = g_net;
    for (Index v = 0; v < out.size(); ++v)
        if (!jackpots.contains(v)) out.clear_out(v);
    out.set_provenance(Provenance::sampled_net);
    return out;
}

/// The seed-independent ingredients: G_net (on the normalized copy of P),
/// the (eps/32)-graph G_geo, and the exact aspect ratio.
struct EuclidParts {
    double epsilon = 1.0;
    Normalized<EuclideanL2> normalized;
    NetPG net;
    ThetaGraph geo;
    double delta = 1.0;
};

inline EuclidParts prepare_euclid_parts(const EuclideanL2& space, const PointSet<EuclideanL2>& points, double epsilon,
                                        unsigned threads = 1) {
    if (space.dim != 2 && space.dim != 3) {
        throw std::domain_error("the merged construction supports d in {2, 3}, got d = " + std::to_string(space.dim));
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::domain_error("epsilon must lie in (0, 1]");
    EuclidParts parts{epsilon, normalize(space, points), {}, {}, 1.0};
    parts.net = build_net_pg_fast(parts.normalized.space, parts.normalized.points, epsilon);
    parts.geo = build_theta_graph(points, space.dim, epsilon / 32.0, threads);
    parts.delta = exact_extremes(space, points).aspect_ratio();
    return parts;
}

/// One sampled merge: sparsify(G_net) united with G_geo.
struct EuclidPG {
    ProximityGraph graph;
    JackpotSet jackpots;
    double tau = 1.0;
    std::uint64_t seed = 0;
    double delta = 1.0;
    std::size_t net_edges = 0;
    std::size_t geo_edges = 0;

    /// edges(G_geo) + tau * edges(G_net): an upper bound on the expected size.
    double expected_edge_bound() const { return static_cast<double>(geo_edges) + tau * static_cast<double>(net_edges); }
};

inline EuclidPG assemble_euclid_pg(const EuclidParts& parts, const SampleConfig& config) {
    EuclidPG out;
    out.tau = resolve_tau(config, parts.delta);
    out.seed = config.seed;
    out.delta = parts.delta;
    out.jackpots = sample_jackpots(parts.net.graph.size(), out.tau, config.seed);
    out.graph = merge_graphs(sparsify(parts.net.graph, out.jackpots), parts.geo.graph);
    out.net_edges = parts.net.graph.edge_count();
    out.geo_edges = parts.geo.graph.edge_count();
    return out;
}

inline EuclidPG build_euclid_pg(const EuclideanL2& space, const PointSet<EuclideanL2>& points, double epsilon,
                                const SampleConfig& config, unsigned threads = 1) {
    return assemble_euclid_pg(prepare_euclid_parts(space, points, epsilon, threads), config);
}

struct BestOfRuns {
    EuclidPG best;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> run_edges;
    std::size_t chosen = 0;  // position in seeds/run_edges
};

/// Runs seeds seed, seed + 1, ..., seed + repeats - 1 over shared parts and
/// keeps the graph with the fewest edges (first such seed on ties).
inline BestOfRuns best_of_runs(const EuclidParts& parts, const SampleConfig& config, unsigned threads = 1) {
    if (config.repeats < 1) throw std::domain_error("best_of_runs: repeats must be >= 1");
    const auto repeats = static_cast<std::size_t>(config.repeats);
    std::vector<EuclidPG> runs(repeats);
    parallel_for(repeats, threads, [&](std::size_t r) {
        SampleConfig c = config;
        c.seed = config.seed + r;
        runs[r] = assemble_euclid_pg(parts, c);
    });
    BestOfRuns out;
    for (std::size_t r = 0; r < repeats; ++r) {
        out.seeds.push_back(runs[r].seed);
        out.run_edges.push_back(runs[r].graph.edge_count());
        if (out.run_edges[r] < out.run_edges[out.chosen]) out.chosen = r;
    }
    out.best = std::move(runs[out.chosen]);
    return out;
}

inline BestOfRuns best_of_runs(const EuclideanL2& space, const PointSet<EuclideanL2>& points, double epsilon,
                               const SampleConfig& config, unsigned threads = 1) {
    return best_of_runs(prepare_euclid_parts(space, points, epsilon, threads), config, threads);
}

/// 1 + ceil(log2(2 delta)).
inline int jackpot_hop_limit(double delta) { return 1 + ceil_log2(2.0 * delta); }

/// ceil(ln n * log2 delta).
inline std::size_t subsequence_limit(std::size_t n, double delta) {
    return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)) * std::log2(delta)));
}

/// Greedy that stops once it has visited `limit` jackpot hop vertices. The
/// hop sequence is chopped after every jackpot hop; `subsequence_ends` holds
/// the exclusive end position of each piece.
struct JackpotTrace {
    SearchTrace trace;
    std::vector<char> is_jackpot;
    std::vector<std::size_t> subsequence_ends;
    int limit = 0;
    bool stopped_early = false;

    Index result() const { return trace.result(); }
};

template <Metric M>
JackpotTrace jackpot_query(const ProximityGraph& graph, const M& space, const PointSet<M>& points, Index start,
                           const typename M::point_type& q, const JackpotSet& jackpots, double delta) {
    if (start >= graph.size()) throw std::domain_error("jackpot_query: start vertex out of range");
    JackpotTrace out;
    out.limit = jackpot_hop_limit(delta);
    SearchTrace& trace = out.trace;
    Hop current{start, space.distance(points[start], q)};
    trace.distance_computations = 1;
    int seen = 0;
    const auto visit = [&](const Hop& h) {
        trace.hops.push_back(h);
        const bool jp = jackpots.contains(h.vertex);
        out.is_jackpot.push_back(jp ? 1 : 0);
        if (jp) {
            ++seen;
            out.subsequence_ends.push_back(trace.hops.size());
        }
    };
    visit(current);
    while (seen < out.limit) {
        const auto nbrs = graph.out(current.vertex);
        trace.distance_computations += nbrs.size();
        std::optional<Hop> best;
        for (Index v : nbrs) {
            const double d = space.distance(points[v], q);
            if (!best || d < best->distance) best = Hop{v, d};
        }
        if (!best || current.distance <= best->distance) break;
        current = *best;
        visit(current);
    }
    out.stopped_early = seen >= out.limit;
    if (out.subsequence_ends.empty() || out.subsequence_ends.back() != trace.hops.size()) {
        out.subsequence_ends.push_back(trace.hops.size());
    }
    return out;
}

/// Lengths of the chopped pieces of a jackpot trace.
inline std::vector<std::size_t> subsequence_lengths(const JackpotTrace& jt) {
    std::vector<std::size_t> lengths;
    std::size_t begin = 0;
    for (std::size_t end : jt.subsequence_ends) {
        lengths.push_back(end - begin);
        begin = end;
    }
    return lengths;
}

/// For every p in P whose greedy sequence on g_geo toward q has at least
/// ln n * log2 delta vertices, a jackpot appears among its first
/// ceil(ln n * log2 delta) vertices.
template <Metric M>
bool jackpot_condition_check(const ProximityGraph& g_geo, const M& space, const PointSet<M>& points,
                             const typename M::point_type& q, const JackpotSet& jackpots, double delta) {
    const std::size_t n = points.size();
    const double long_length = std::log(static_cast<double>(n)) * std::log2(delta);
    const std::size_t prefix = subsequence_limit(n, delta);
    for (Index p = 0; p < n; ++p) {
        const SearchTrace trace = greedy_search(g_geo, space, points, p, q);
        if (static_cast<double>(trace.hops.size()) < long_length) continue;
        bool found = false;
        for (std::size_t k = 0; k < std::min(prefix, trace.hops.size()); ++k) {
            if (jackpots.contains(trace.hops[k].vertex)) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

struct JackpotDropViolation {
    std::size_t piece = 0;  // index of the earlier subsequence
    int before = 0;
    int after = 0;
};

/// Endpoint log-drop across pieces: when no hop is a (1+eps)-ANN, each piece
/// ending at a jackpot p_i and the next piece's endpoint p_{i+1} satisfy
/// ceil(log2 D(p_i, nn)) > ceil(log2 D(p_{i+1}, nn)). Traces containing an
/// ANN hop are outside the statement and pass vacuously.
template <Metric M>
std::optional<JackpotDropViolation> check_jackpot_log_drop(const JackpotTrace& jt, const M& space,
                                                           const PointSet<M>& points, Index nn, double nn_distance,
                                                           double epsilon) {
    for (const Hop& h : jt.trace.hops)
        if (is_approx_nn(h.distance, nn_distance, epsilon)) return std::nullopt;
    const auto& ends = jt.subsequence_ends;
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
        const Index a = jt.trace.hops[ends[i] - 1].vertex;
        const Index b = jt.trace.hops[ends[i + 1] - 1].vertex;
        if (!jt.is_jackpot[ends[i] - 1]) continue;
        const int before = ceil_log2(space.distance(points[a], points[nn]));
        const int after = ceil_log2(space.distance(points[b], points[nn]));
        if (!(before > after)) return JackpotDropViolation{i, before, after};
    }
    return std::nullopt;
}

}  // namespace navgraph

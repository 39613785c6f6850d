#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "navgraph/metric.hpp"

namespace navgraph {

enum class Provenance { net, theta, sampled_net, merged, custom };

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::net: return "net";
    case Provenance::theta: return "theta";
    case Provenance::sampled_net: return "sampled-net";
    case Provenance::merged: return "merged";
    case Provenance::custom: return "custom";
    }
    return "unknown";
}

/// Simple directed graph over point indices [0, n). Out-edge lists are kept
/// sorted and free of self-loops and duplicates.
class ProximityGraph {
public:
    ProximityGraph() = default;
    explicit ProximityGraph(std::size_t n, Provenance provenance = Provenance::custom)
        : adjacency_(n), provenance_(provenance) {}

    /// Builds from raw per-vertex lists; sorts, drops self-loops and duplicates.
    static ProximityGraph from_lists(std::vector<std::vector<Index>> lists,
                                     Provenance provenance = Provenance::custom) {
        ProximityGraph g;
        g.provenance_ = provenance;
        const std::size_t n = lists.size();
        for (std::size_t v = 0; v < n; ++v) {
            auto& out = lists[v];
            for (Index t : out) {
                if (t >= n) throw std::domain_error("edge target " + std::to_string(t) + " out of range");
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            out.erase(std::remove(out.begin(), out.end(), static_cast<Index>(v)), out.end());
        }
        g.adjacency_ = std::move(lists);
        return g;
    }

    static ProximityGraph complete(std::size_t n) {
        std::vector<std::vector<Index>> lists(n);
        for (std::size_t v = 0; v < n; ++v) {
            lists[v].reserve(n ? n - 1 : 0);
            for (std::size_t u = 0; u < n; ++u)
                if (u != v) lists[v].push_back(static_cast<Index>(u));
        }
        return from_lists(std::move(lists), Provenance::custom);
    }

    std::size_t size() const { return adjacency_.size(); }
    Provenance provenance() const { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = p; }

    std::span<const Index> out(Index v) const { return adjacency_.at(v); }
    std::size_t out_degree(Index v) const { return adjacency_.at(v).size(); }

    bool has_edge(Index from, Index to) const {
        const auto& out = adjacency_.at(from);
        return std::binary_search(out.begin(), out.end(), to);
    }

    /// Inserts (from, to) keeping the list sorted. Self-loops are rejected.
    void add_edge(Index from, Index to) {
        if (from >= size() || to >= size()) throw std::domain_error("add_edge: vertex out of range");
        if (from == to) throw std::domain_error("add_edge: self-loop");
        auto& out = adjacency_[from];
        auto it = std::lower_bound(out.begin(), out.end(), to);
        if (it == out.end() || *it != to) out.insert(it, to);
    }

    bool remove_edge(Index from, Index to) {
        auto& out = adjacency_.at(from);
        auto it = std::lower_bound(out.begin(), out.end(), to);
        if (it == out.end() || *it != to) return false;
        out.erase(it);
        return true;
    }

    void clear_out(Index v) { adjacency_.at(v).clear(); }

    std::size_t edge_count() const {
        std::size_t m = 0;
        for (const auto& out : adjacency_) m += out.size();
        return m;
    }

    const std::vector<std::vector<Index>>& adjacency() const { return adjacency_; }

    friend bool operator==(const ProximityGraph& a, const ProximityGraph& b) {
        return a.adjacency_ == b.adjacency_;
    }

private:
    std::vector<std::vector<Index>> adjacency_;
    Provenance provenance_ = Provenance::custom;
};

/// Per-vertex union of the two out-edge sets.
inline ProximityGraph merge_graphs(const ProximityGraph& g1, const ProximityGraph& g2) {
    if (g1.size() != g2.size()) {
        throw std::domain_error("merge_graphs: vertex counts differ (" + std::to_string(g1.size()) +
                                " vs " + std::to_string(g2.size()) + ")");
    }
    std::vector<std::vector<Index>> lists(g1.size());
    for (Index v = 0; v < g1.size(); ++v) {
        auto a = g1.out(v);
        auto b = g2.out(v);
        lists[v].reserve(a.size() + b.size());
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(lists[v]));
    }
    return ProximityGraph::from_lists(std::move(lists), Provenance::merged);
}

struct GraphStats {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t min_out_degree = 0;
    std::size_t max_out_degree = 0;
    double mean_out_degree = 0.0;
    std::size_t isolated = 0;  // vertices with out-degree 0
};

inline GraphStats graph_stats(const ProximityGraph& g) {
    GraphStats s;
    s.vertices = g.size();
    if (g.size() == 0) return s;
    s.min_out_degree = g.out_degree(0);
    for (Index v = 0; v < g.size(); ++v) {
        const std::size_t d = g.out_degree(v);
        s.edges += d;
        s.min_out_degree = std::min(s.min_out_degree, d);
        s.max_out_degree = std::max(s.max_out_degree, d);
        if (d == 0) ++s.isolated;
    }
    s.mean_out_degree = static_cast<double>(s.edges) / static_cast<double>(g.size());
    return s;
}

}  // namespace navgraph

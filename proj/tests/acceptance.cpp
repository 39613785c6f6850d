#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "navgraph/navgraph.hpp"

using namespace navgraph;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

unsigned worker_count() { return resolve_threads(0); }

struct Outcome {
    bool passed = true;
    std::string detail;
};

/// Counts from the standard query protocol: navigability over
/// P + 1000 random + 500 perturbed queries, then greedy from 10 random
/// starts per query.
struct ProtocolStats {
    bool navigable = true;
    std::string witness;
    std::size_t queries = 0;
    std::size_t searches = 0;
    std::size_t wrong_answers = 0;
    std::size_t hop_bound_violations = 0;  // only counted when h is given
    std::size_t log_drop_violations = 0;   // only counted when h is given

    bool passed() const { return navigable && wrong_answers == 0; }

    void add(const ProtocolStats& o) {
        if (navigable && !o.navigable) witness = o.witness;
        navigable = navigable && o.navigable;
        queries += o.queries;
        searches += o.searches;
        wrong_answers += o.wrong_answers;
        hop_bound_violations += o.hop_bound_violations;
        log_drop_violations += o.log_drop_violations;
    }
};

constexpr std::size_t kRandomQueries = 1000;
constexpr std::size_t kPerturbedQueries = 500;
constexpr std::size_t kStartsPerQuery = 10;

ProtocolStats run_protocol(const ProximityGraph& g, const EuclideanL2& space, const PointSet<EuclideanL2>& points,
                           double eps, std::uint64_t seed, std::optional<int> h) {
    ProtocolStats stats;
    const double dmin = exact_extremes(space, points).dmin;
    const auto queries = query_protocol(points, eps, dmin, kRandomQueries, kPerturbedQueries, seed);
    stats.queries = queries.size();
    const NavigabilityReport nav = check_navigable(g, space, points, eps, queries, worker_count());
    if (!nav.passed()) {
        stats.navigable = false;
        std::ostringstream w;
        w << "vertex " << nav.witness->vertex << " stuck on query " << nav.witness->query;
        stats.witness = w.str();
    }
    std::vector<ProtocolStats> per_query(queries.size());
    parallel_for(queries.size(), worker_count(), [&](std::size_t qi) {
        ProtocolStats& s = per_query[qi];
        const Neighbor nn = brute_force_nn(space, points, queries[qi]);
        std::mt19937_64 rng(splitmix64(seed * 0x9e3779b97f4a7c15ULL + qi));
        std::uniform_int_distribution<Index> pick(0, static_cast<Index>(points.size() - 1));
        for (std::size_t k = 0; k < kStartsPerQuery; ++k) {
            const SearchTrace tr = greedy_search(g, space, points, pick(rng), queries[qi]);
            ++s.searches;
            if (!is_approx_nn(tr.result_distance(), nn.distance, eps)) ++s.wrong_answers;
            if (!h) continue;
            const auto first = first_approx_hop(tr, nn.distance, eps);
            if (!first || *first > static_cast<std::size_t>(*h)) ++s.hop_bound_violations;
            if (check_log_drop(tr, space, points, nn.index, nn.distance, eps)) ++s.log_drop_violations;
        }
    });
    for (const auto& s : per_query) stats.add(s);
    return stats;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

Normalized<EuclideanL2> normalized_uniform(std::size_t n, std::size_t dim, std::uint64_t seed) {
    return normalize(EuclideanL2{dim}, PointSet<EuclideanL2>(uniform_points(n, dim, seed)));
}

// Criteria 1, 2 and 4 share the G_net runs.
struct NetSuite {
    ProtocolStats stats;
    std::size_t graphs = 0;
    std::size_t structure_failures = 0;
    double seconds = 0.0;
};

NetSuite& net_suite() {
    static NetSuite suite = [] {
        NetSuite s;
        const auto start = Clock::now();
        for (std::size_t dim : {2U, 3U}) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const auto norm = normalized_uniform(500, dim, 1000 + 10 * dim + seed);
                for (double eps : {1.0, 0.5, 0.25}) {
                    const NetPG pg = build_net_pg_fast(norm.space, norm.points, eps);
                    ++s.graphs;
                    if (check_edge_structure(norm.space, norm.points, pg)) ++s.structure_failures;
                    s.stats.add(run_protocol(pg.graph, norm.space, norm.points, eps, seed, pg.hierarchy.h));
                }
            }
        }
        s.seconds = seconds_since(start);
        return s;
    }();
    return suite;
}

std::size_t extra_structure_failures = 0;
std::size_t extra_structure_graphs = 0;

Outcome criterion_navigability() {
    const NetSuite& s = net_suite();
    Outcome o;
    o.passed = s.stats.passed() && s.seconds < 300.0;
    o.detail = fmt("%zu graphs, %zu queries, %zu searches, %zu wrong, navigable=%s, %.1f s (budget 300 s)", s.graphs,
                   s.stats.queries, s.stats.searches, s.stats.wrong_answers, s.stats.navigable ? "yes" : "no",
                   s.seconds);
    if (!s.stats.navigable) o.detail += "; " + s.stats.witness;
    return o;
}

Outcome criterion_hop_bound() {
    const NetSuite& s = net_suite();
    Outcome o;
    o.passed = s.stats.hop_bound_violations == 0 && s.stats.log_drop_violations == 0;
    o.detail = fmt("%zu traces, %zu hop-bound violations, %zu log-drop violations", s.stats.searches,
                   s.stats.hop_bound_violations, s.stats.log_drop_violations);
    return o;
}

Outcome criterion_fast_equivalence() {
    const std::size_t sizes[] = {150, 400, 900, 2000, 1300};
    const double epsilons[] = {1.0, 0.5, 0.25};
    std::size_t equal = 0, total = 0;
    for (std::size_t k = 0; k < 30; ++k) {
        const std::size_t dim = 1 + k % 3;
        const std::size_t n = sizes[k % 5];
        const double eps = epsilons[(k / 3) % 3];
        const auto run = [&](const auto& space, const auto& points) {
            const auto norm = normalize(space, points);
            const NetPG naive = build_net_pg_naive(norm.space, norm.points, eps, worker_count());
            const NetPG fast = build_net_pg_fast(norm.space, norm.points, eps);
            std::ostringstream a, b;
            write_graph(a, naive.graph);
            write_graph(b, fast.graph);
            ++total;
            if (a.str() == b.str()) ++equal;
            for (const NetPG* pg : {&naive, &fast}) {
                ++extra_structure_graphs;
                if (check_edge_structure(norm.space, norm.points, *pg)) ++extra_structure_failures;
            }
        };
        const auto coords = uniform_points(n, dim, 500 + k);
        if (k % 4 == 3) {
            run(EuclideanLinf{dim}, PointSet<EuclideanLinf>(coords));
        } else {
            run(EuclideanL2{dim}, PointSet<EuclideanL2>(coords));
        }
    }
    Outcome o;
    o.passed = equal == total && total == 30;
    o.detail = fmt("%zu/%zu instances byte-equal (n <= 2000, d in 1..3, L2 and Linf)", equal, total);
    return o;
}

Outcome criterion_edge_structure() {
    const NetSuite& s = net_suite();
    const std::size_t graphs = s.graphs + extra_structure_graphs;
    const std::size_t failures = s.structure_failures + extra_structure_failures;
    Outcome o;
    o.passed = failures == 0 && graphs > 0;
    o.detail = fmt("%zu graphs checked, %zu violations", graphs, failures);
    return o;
}

Outcome criterion_theta() {
    ProtocolStats all;
    std::size_t degree_violations = 0, graphs = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto pts = PointSet<EuclideanL2>(uniform_points(500, 2, 2000 + seed));
        for (double eps : {1.0, 0.5}) {
            const ThetaGraph tg = build_theta_graph(pts, 2, eps / 32.0, worker_count());
            ++graphs;
            for (Index v = 0; v < pts.size(); ++v)
                if (tg.graph.out_degree(v) > tg.family.size()) ++degree_violations;
            all.add(run_protocol(tg.graph, EuclideanL2{2}, pts, eps, seed, std::nullopt));
        }
    }
    Outcome o;
    o.passed = all.passed() && degree_violations == 0;
    o.detail = fmt("%zu graphs, %zu searches, %zu wrong, navigable=%s, %zu out-degree violations", graphs,
                   all.searches, all.wrong_answers, all.navigable ? "yes" : "no", degree_violations);
    return o;
}

Outcome criterion_merged() {
    const double eps = 1.0;
    const auto pts = PointSet<EuclideanL2>(uniform_points(500, 2, 3000));
    const EuclidParts parts = prepare_euclid_parts(EuclideanL2{2}, pts, eps, worker_count());
    const auto& npts = parts.normalized.points;

    ProtocolStats all;
    double jackpot_sum = 0.0, tau = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SampleConfig c;
        c.seed = seed;
        const EuclidPG pg = assemble_euclid_pg(parts, c);
        tau = pg.tau;
        jackpot_sum += static_cast<double>(pg.jackpots.size());
        all.add(run_protocol(pg.graph, parts.normalized.space, npts, eps, seed, std::nullopt));
    }
    const double n = static_cast<double>(npts.size());
    const double mean_jackpots = jackpot_sum / 20.0;
    const double sigma_mean = std::sqrt(n * tau * (1.0 - tau) / 20.0);
    const bool jackpots_ok = std::abs(mean_jackpots - tau * n) <= 3.0 * sigma_mean;

    std::vector<std::size_t> best, every;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        SampleConfig c;
        c.seed = 1000 + 16 * trial;
        c.repeats = 16;
        const BestOfRuns runs = best_of_runs(parts, c, worker_count());
        best.push_back(runs.best.graph.edge_count());
        every.insert(every.end(), runs.run_edges.begin(), runs.run_edges.end());
    }
    const double mean_edges =
        static_cast<double>(std::accumulate(every.begin(), every.end(), std::size_t{0})) / static_cast<double>(every.size());
    const auto good = static_cast<std::size_t>(
        std::count_if(best.begin(), best.end(), [&](std::size_t e) { return static_cast<double>(e) <= 2.0 * mean_edges; }));

    Outcome o;
    o.passed = all.passed() && jackpots_ok && good >= 45;
    o.detail = fmt("20 seeds: navigable=%s, %zu wrong of %zu searches; jackpots mean %.1f vs tau*n %.1f (3 sigma %.1f); "
                   "best-of-16 <= 2x mean in %zu/50",
                   all.navigable ? "yes" : "no", all.wrong_answers, all.searches, mean_jackpots, tau * n,
                   3.0 * sigma_mean, good);
    return o;
}

Outcome criterion_tree() {
    const auto start = Clock::now();
    Outcome o;
    for (const auto& [n, delta] : {std::pair<std::uint64_t, std::uint64_t>{4, 8}, {16, 256}, {32, 1 << 10}}) {
        const TreeInstance inst = gen_tree_instance(n, delta);
        const auto r = verify_forced_edges_tree(inst);
        const std::size_t expected = n * static_cast<std::size_t>(inst.h / 2);
        if (!r.all_certified() || r.certified != expected) o.passed = false;
        o.detail += fmt("(%llu, %llu): %zu/%zu; ", static_cast<unsigned long long>(n),
                        static_cast<unsigned long long>(delta), r.certified, expected);
    }
    const double secs = seconds_since(start);
    if (secs >= 60.0) o.passed = false;
    o.detail += fmt("%.2f s (budget 60 s)", secs);
    return o;
}

Outcome criterion_blocks() {
    Outcome o;
    for (const auto& [s, t, d] :
         {std::tuple<std::size_t, std::size_t, std::size_t>{2, 1, 1}, {4, 3, 2}, {3, 2, 3}}) {
        const BlockInstance inst = gen_block_instance(s, t, d);
        const auto r = verify_forced_edges_blocks(inst);
        const std::size_t expected = t * inst.block_size * (inst.block_size - 1);
        const bool triangles = !verify_block_triangles(inst).has_value();
        if (!r.all_certified() || r.certified != expected || !triangles) o.passed = false;
        o.detail += fmt("(%zu,%zu,%zu): %zu/%zu pairs, triangles %s; ", s, t, d, r.certified, expected,
                        triangles ? "ok" : "FAIL");
    }
    return o;
}

Outcome criterion_doubling() {
    Outcome o;
    std::size_t balls = 0, worst_tree = 0, worst_block = 0;
    for (const auto& [n, delta] : {std::pair<std::uint64_t, std::uint64_t>{4, 8}, {16, 256}, {32, 1 << 10}}) {
        const DoublingReport r = check_tree_doubling(gen_tree_instance(n, delta), 1000, n);
        balls += r.balls_checked;
        worst_tree = std::max(worst_tree, r.max_cover);
        if (!r.passed() || r.balls_checked != 1000 || r.max_cover > 2) o.passed = false;
    }
    for (const auto& [s, t, d] :
         {std::tuple<std::size_t, std::size_t, std::size_t>{2, 1, 1}, {4, 3, 2}, {3, 2, 3}}) {
        const BlockInstance inst = gen_block_instance(s, t, d);
        const DoublingReport r = check_block_doubling(inst, inst.n / 2, 1000, s * 100 + t * 10 + d);
        balls += r.balls_checked;
        worst_block = std::max(worst_block, r.max_cover);
        if (!r.passed() || r.balls_checked != 1000 || r.max_cover > (std::size_t{1} << d) + 1) o.passed = false;
    }
    o.detail = fmt("%zu balls, tree covers <= %zu balls, block covers <= %zu pieces", balls, worst_tree, worst_block);
    return o;
}

Outcome criterion_facts() {
    Outcome o;
    for (const FactReport& r : {check_tan_bound(), check_isosceles_chord(), check_cone_slack()}) {
        if (!r.passed() || r.points < 100000) o.passed = false;
        o.detail += r.fact + fmt(": %zu points %s; ", r.points, r.passed() ? "ok" : "FAIL");
    }
    return o;
}

Outcome criterion_scaling() {
    std::vector<double> net_ratio, merged_ratio;
    std::string detail;
    for (std::size_t n : {250U, 500U, 1000U, 2000U}) {
        const auto pts = PointSet<EuclideanL2>(uniform_points(n, 2, 4000 + n));
        const double delta = exact_extremes(EuclideanL2{2}, pts).aspect_ratio();
        const EuclidParts parts = prepare_euclid_parts(EuclideanL2{2}, pts, 1.0, worker_count());
        net_ratio.push_back(static_cast<double>(parts.net.graph.edge_count()) /
                            (static_cast<double>(n) * std::log2(delta)));
        double merged = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            SampleConfig c;
            c.seed = seed;
            merged += static_cast<double>(assemble_euclid_pg(parts, c).graph.edge_count());
        }
        merged_ratio.push_back(merged / 5.0 / static_cast<double>(n));
        detail += fmt("n=%zu: net %.2f, merged %.1f; ", n, net_ratio.back(), merged_ratio.back());
    }
    const auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    Outcome o;
    o.passed = spread(net_ratio) < 2.0 && spread(merged_ratio) < 2.0;
    o.detail = detail + fmt("spread net %.2fx, merged %.2fx (limit 2x)", spread(net_ratio), spread(merged_ratio));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"navigability suite", criterion_navigability},
        {"hop bound and log-drop", criterion_hop_bound},
        {"fast-build equivalence", criterion_fast_equivalence},
        {"edge-structure law", criterion_edge_structure},
        {"theta-graph navigability", criterion_theta},
        {"merged-graph navigability and sampling", criterion_merged},
        {"tree forced edges", criterion_tree},
        {"block forced pairs and triangles", criterion_blocks},
        {"doubling witnesses", criterion_doubling},
        {"cone inequalities", criterion_facts},
        {"edge-count scaling", criterion_scaling},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failed;
        std::printf("%s  %2zu  %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

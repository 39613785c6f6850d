#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "navgraph/navgraph.hpp"

using namespace navgraph;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Raised for bad arguments that CLI11 cannot catch on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

/// Run record written next to generated files.
struct Manifest {
    json doc;

    explicit Manifest(const std::string& command) {
        doc["command"] = command;
        doc["parameters"] = json::object();
        doc["files"] = json::array();
        doc["result"] = json::object();
    }

    void file(const std::string& role, const std::string& path) {
        doc["files"].push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
    }

    void save(const std::string& path) const {
        write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    }
};

unsigned threads_from(int flag) {
    if (flag > 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("NAVGRAPH_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

/// Calls body(space, points) with the metric matching the point file:
/// coordinate files use L2 or L-infinity, abstract files the tree metric.
template <typename Body>
auto with_space(const PointFile& pf, const std::string& metric, Body&& body) {
    if (pf.dim == 0) {
        if (pf.ids.empty()) throw UsageError("point file is empty");
        const std::uint64_t top = *std::max_element(pf.ids.begin(), pf.ids.end());
        TreeMetric space;
        space.leaf_count = std::max<std::uint64_t>(2, std::bit_ceil(top + 1));
        return body(space, PointSet<TreeMetric>(pf.ids));
    }
    if (metric == "linf") return body(EuclideanLinf{pf.dim}, PointSet<EuclideanLinf>(pf.coords));
    return body(EuclideanL2{pf.dim}, PointSet<EuclideanL2>(pf.coords));
}

PointFile load_points(const std::string& path) { return read_file<PointFile>(path, read_points); }
ProximityGraph load_graph(const std::string& path) { return read_file<ProximityGraph>(path, read_graph); }

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
    std::size_t n = 1000, d = 2, s = 2, t = 1;
    std::uint64_t delta = 8, seed = 0;
    double side = 1.0;
    std::string out, manifest;
};

int cmd_gen(const std::string& kind, const GenOptions& o) {
    Manifest m("gen " + kind);
    PointFile pf;
    if (kind == "uniform") {
        pf.dim = o.d;
        pf.coords = uniform_points(o.n, o.d, o.seed, o.side);
        m.doc["parameters"] = {{"n", o.n}, {"d", o.d}, {"side", o.side}};
        m.doc["seeds"] = {o.seed};
    } else if (kind == "tree") {
        const TreeInstance inst = gen_tree_instance(o.n, o.delta);
        pf.ids = inst.points;
        m.doc["parameters"] = {{"n", o.n}, {"delta", o.delta}};
        m.doc["result"] = {{"points", inst.points.size()}, {"h", inst.h}, {"leaf_count", inst.space.leaf_count},
                           {"subtree_points", inst.subtree.size()}, {"path_points", inst.path.size()}};
    } else {
        const BlockInstance inst = gen_block_instance(o.s, o.t, o.d);
        pf.dim = o.d;
        pf.coords = inst.coords;
        m.doc["parameters"] = {{"s", o.s}, {"t", o.t}, {"d", o.d}};
        m.doc["result"] = {{"points", inst.n}, {"epsilon", inst.epsilon}, {"block_size", inst.block_size}};
    }
    write_file(o.out, [&](std::ostream& out) { write_points(out, pf); });
    m.file("points", o.out);
    m.save(o.manifest.empty() ? o.out + ".json" : o.manifest);
    std::cout << pf.size() << " points written to " << o.out << '\n';
    return kExitPass;
}

// ---------------------------------------------------------------------------
// build

struct BuildOptions {
    double eps = 1.0, z = 4.0;
    std::optional<double> tau;
    int repeats = 1;
    std::uint64_t seed = 0;
    std::string metric = "l2", in, out, manifest;
    int threads = 0;
};

struct Built {
    ProximityGraph graph;
    json result = json::object();
};

PointSet<EuclideanL2> euclidean_points(const PointFile& pf, const std::string& algo) {
    if (pf.dim != 2 && pf.dim != 3) {
        throw UsageError(algo + " needs Euclidean points with d in {2, 3}, got d = " + std::to_string(pf.dim));
    }
    return PointSet<EuclideanL2>(pf.coords);
}

Built build_graph(const std::string& algo, const PointFile& pf, const BuildOptions& o, unsigned threads) {
    Built b;
    if (algo == "net" || algo == "net-naive") {
        with_space(pf, o.metric, [&](const auto& space, const auto& points) {
            const auto norm = normalize(space, points);
            const NetPG pg = algo == "net" ? build_net_pg_fast(norm.space, norm.points, o.eps)
                                           : build_net_pg_naive(norm.space, norm.points, o.eps, threads);
            b.graph = pg.graph;
            b.result = {{"h", pg.hierarchy.h}, {"eta", pg.params.eta}, {"phi", pg.params.phi},
                        {"scale", norm.scale}};
            return 0;
        });
        return b;
    }
    if (o.metric != "l2") throw UsageError(algo + " supports only the L2 metric");
    const PointSet<EuclideanL2> points = euclidean_points(pf, algo);
    if (algo == "theta") {
        if (!(o.eps > 0.0 && o.eps <= 1.0)) throw UsageError("epsilon must lie in (0, 1]");
        const ThetaGraph tg = build_theta_graph(points, pf.dim, o.eps / 32.0, threads);
        b.graph = tg.graph;
        b.result = {{"theta", tg.family.theta}, {"cones", tg.family.size()}};
        return b;
    }
    SampleConfig config;
    config.z = o.z;
    config.tau = o.tau;
    config.seed = o.seed;
    config.repeats = o.repeats;
    const BestOfRuns runs = best_of_runs(EuclideanL2{pf.dim}, points, o.eps, config, threads);
    b.graph = runs.best.graph;
    b.result = {{"tau", runs.best.tau},          {"delta", runs.best.delta},
                {"jackpots", runs.best.jackpots.size()}, {"seeds", runs.seeds},
                {"run_edges", runs.run_edges},    {"chosen_seed", runs.seeds[runs.chosen]},
                {"net_edges", runs.best.net_edges}, {"geo_edges", runs.best.geo_edges}};
    return b;
}

int cmd_build(const std::string& algo, const BuildOptions& o) {
    const unsigned threads = threads_from(o.threads);
    const PointFile pf = load_points(o.in);
    const auto start = Clock::now();
    Built b = build_graph(algo, pf, o, threads);
    const double ms = elapsed_ms(start);
    write_file(o.out, [&](std::ostream& out) { write_graph(out, b.graph); });

    Manifest m("build " + algo);
    m.doc["parameters"] = {{"eps", o.eps}, {"metric", pf.dim == 0 ? "tree" : o.metric}};
    if (algo == "merged") {
        m.doc["parameters"]["z"] = o.z;
        if (o.tau) m.doc["parameters"]["tau"] = *o.tau;
        m.doc["parameters"]["repeats"] = o.repeats;
        m.doc["seeds"] = {o.seed};
    }
    m.file("points", o.in);
    m.file("graph", o.out);
    const GraphStats stats = graph_stats(b.graph);
    b.result["vertices"] = stats.vertices;
    b.result["edges"] = stats.edges;
    b.result["min_out_degree"] = stats.min_out_degree;
    b.result["max_out_degree"] = stats.max_out_degree;
    m.doc["result"] = b.result;
    m.doc["timing"] = {{"build_ms", ms}, {"threads", threads}};
    m.save(o.manifest.empty() ? o.out + ".json" : o.manifest);
    std::cout << algo << ": " << stats.edges << " edges, min out-degree " << stats.min_out_degree << ", built in "
              << format_double(ms) << " ms\n";
    return kExitPass;
}

// ---------------------------------------------------------------------------
// query

struct QueryOptions {
    std::string graph, points, q, queries, trace;
    Index start = 0;
    std::uint64_t budget = kUnlimitedBudget;
    std::string metric = "l2";
};

Coords parse_coords(const std::string& text, std::size_t dim) {
    Coords out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("query coordinate '" + item + "' is not a number");
        }
    }
    if (out.size() != dim) {
        throw UsageError("query has " + std::to_string(out.size()) + " coordinates, points have " +
                         std::to_string(dim));
    }
    return out;
}

int cmd_query(const QueryOptions& o) {
    const PointFile pf = load_points(o.points);
    const ProximityGraph g = load_graph(o.graph);
    if (g.size() != pf.size()) {
        throw UsageError("graph has " + std::to_string(g.size()) + " vertices but the point file has " +
                         std::to_string(pf.size()) + " points");
    }
    if (o.q.empty() == o.queries.empty()) throw UsageError("give exactly one of --q or --queries");
    if (o.budget < 1) throw UsageError("budget must be >= 1");
    PointFile qf;
    if (!o.queries.empty()) {
        qf = load_points(o.queries);
        if (qf.dim != pf.dim) throw UsageError("query file dimension differs from the point file");
    } else if (pf.dim == 0) {
        qf.ids.push_back(std::stoull(o.q));
    } else {
        qf.dim = pf.dim;
        qf.coords.push_back(parse_coords(o.q, pf.dim));
    }
    with_space(pf, o.metric, [&](const auto& space, const auto& points) {
        const auto& qs = [&]() -> const auto& {
            if constexpr (std::is_same_v<std::decay_t<decltype(points)>, PointSet<TreeMetric>>) {
                return qf.ids;
            } else {
                return qf.coords;
            }
        }();
        for (std::size_t k = 0; k < qs.size(); ++k) {
            const SearchTrace tr = budgeted_search(g, space, points, o.start, qs[k], o.budget);
            std::cout << "answer=" << tr.result() << " distance=" << format_double(tr.result_distance())
                      << " hops=" << tr.hops.size() - 1 << " distance_computations=" << tr.distance_computations
                      << " terminated=" << (tr.terminated == Termination::self ? "self" : "budget") << '\n';
            if (!o.trace.empty() && k == 0) {
                write_file(o.trace, [&](std::ostream& out) { write_trace(out, tr); });
            }
        }
        return 0;
    });
    return kExitPass;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
    std::string graph, points, metric = "l2", manifest;
    double eps = 1.0;
    std::size_t random = 1000, perturbed = 500, samples = 1000, n = 4, s = 2, t = 1, d = 1;
    std::uint64_t delta = 8, seed = 0;
    std::optional<std::size_t> p_star;
    int threads = 0;
};

struct Verdict {
    bool passed = true;
    std::string message;
    json detail = json::object();
};

Verdict verify_navigable(const VerifyOptions& o) {
    const PointFile pf = load_points(o.points);
    const ProximityGraph g = load_graph(o.graph);
    if (g.size() != pf.size()) throw UsageError("graph and point file sizes differ");
    return with_space(pf, o.metric, [&](const auto& space, const auto& points) {
        using Space = std::decay_t<decltype(space)>;
        PointSet<Space> queries = points;
        if constexpr (CoordinateMetric<Space>) {
            const double dmin = exact_extremes(space, points).dmin;
            queries = query_protocol(points, o.eps, dmin, o.random, o.perturbed, o.seed);
        }
        const NavigabilityReport r = check_navigable(g, space, points, o.eps, queries, threads_from(o.threads));
        Verdict v;
        v.detail = {{"queries", queries.size()}, {"pairs_checked", r.pairs_checked}};
        if (r.passed()) {
            v.message = "navigable over " + std::to_string(queries.size()) + " queries";
        } else {
            const auto& w = *r.witness;
            v.passed = false;
            v.message = "not navigable: vertex " + std::to_string(w.vertex) + " is stuck on query " +
                        std::to_string(w.query) + " at distance " + format_double(w.vertex_distance) +
                        " (nearest " + std::to_string(w.nn) + " at " + format_double(w.nn_distance) + ")";
            v.detail["witness"] = {{"vertex", w.vertex}, {"query", w.query}, {"nn", w.nn}};
        }
        return v;
    });
}

Verdict verify_net_props(const VerifyOptions& o) {
    const PointFile pf = load_points(o.points);
    return with_space(pf, o.metric, [&](const auto& space, const auto& points) {
        const auto norm = normalize(space, points);
        const NetPG pg = build_net_pg_fast(norm.space, norm.points, o.eps);
        Verdict v;
        for (int i = 0; i <= pg.hierarchy.h; ++i) {
            const Net& net = pg.hierarchy.levels[static_cast<std::size_t>(i)];
            if (auto bad = verify_r_net(norm.space, norm.points, net)) {
                v.passed = false;
                v.message = "level " + std::to_string(i) + ": " + describe(*bad);
                return v;
            }
        }
        if (auto bad = check_edge_structure(norm.space, norm.points, pg)) {
            v.passed = false;
            v.message = "vertex " + std::to_string(bad->vertex) + " level " + std::to_string(bad->level) + ": " +
                        bad->what;
            return v;
        }
        v.message = "nets and edge structure hold on " + std::to_string(pg.hierarchy.h + 1) + " levels";
        v.detail = {{"h", pg.hierarchy.h}, {"edges", pg.graph.edge_count()}};
        return v;
    });
}

template <typename P>
Verdict forced_verdict(const ForcedEdgeReport<P>& r) {
    Verdict v;
    v.passed = r.all_certified();
    v.detail = {{"pairs_checked", r.pairs_checked}, {"certified", r.certified}};
    if (v.passed) {
        v.message = std::to_string(r.certified) + " forced edges certified";
    } else {
        const auto& w = r.failures.front();
        v.message = "pair (" + std::to_string(w.from) + ", " + std::to_string(w.to) + ") not certified: " + w.reason;
    }
    return v;
}

Verdict verify_triangle_task(const VerifyOptions& o) {
    Verdict v;
    if (o.points.empty()) {
        const BlockInstance inst = gen_block_instance(o.s, o.t, o.d);
        if (auto bad = verify_block_triangles(inst)) {
            v.passed = false;
            v.message = "D_{p*} with p* = " + std::to_string(*bad) + " violates the triangle inequality";
        } else {
            v.message = "all " + std::to_string(inst.n) + " distance functions satisfy the triangle inequality";
        }
        return v;
    }
    const PointFile pf = load_points(o.points);
    return with_space(pf, o.metric, [&](const auto& space, const auto& points) {
        Verdict out;
        if (auto bad = verify_triangle(space, points)) {
            out.passed = false;
            std::ostringstream msg;
            msg << "triangle violated: D(a,b) = " << format_double(bad->ab) << " > " << format_double(bad->ac)
                << " + " << format_double(bad->bc);
            out.message = msg.str();
        } else {
            out.message = "triangle inequality holds on all " + std::to_string(points.size()) + "^3 triples";
        }
        return out;
    });
}

Verdict verify_doubling(const VerifyOptions& o, bool tree) {
    const DoublingReport r = tree ? check_tree_doubling(gen_tree_instance(o.n, o.delta), o.samples, o.seed)
                                  : [&] {
                                        const BlockInstance inst = gen_block_instance(o.s, o.t, o.d);
                                        return check_block_doubling(inst, o.p_star.value_or(0), o.samples, o.seed);
                                    }();
    Verdict v;
    v.passed = r.passed();
    v.detail = {{"balls_checked", r.balls_checked}, {"max_cover", r.max_cover}};
    v.message = v.passed ? std::to_string(r.balls_checked) + " balls covered, at most " +
                               std::to_string(r.max_cover) + " half-radius balls each"
                         : *r.failure;
    return v;
}

Verdict verify_facts() {
    Verdict v;
    std::vector<std::string> lines;
    for (const FactReport& r : {check_tan_bound(), check_isosceles_chord(), check_cone_slack()}) {
        v.detail[r.fact] = {{"points", r.points}, {"passed", r.passed()}};
        if (!r.passed()) v.passed = false;
        lines.push_back(r.fact + ": " + (r.passed() ? "pass" : "FAIL") + " on " + std::to_string(r.points) +
                        " points");
    }
    for (std::size_t k = 0; k < lines.size(); ++k) v.message += (k ? "\n" : "") + lines[k];
    return v;
}

int cmd_verify(const std::string& task, const VerifyOptions& o) {
    Verdict v;
    if (task == "navigable") {
        v = verify_navigable(o);
    } else if (task == "net-props") {
        v = verify_net_props(o);
    } else if (task == "forced-tree") {
        v = forced_verdict(verify_forced_edges_tree(gen_tree_instance(o.n, o.delta)));
    } else if (task == "forced-blocks") {
        v = forced_verdict(verify_forced_edges_blocks(gen_block_instance(o.s, o.t, o.d)));
    } else if (task == "triangle") {
        v = verify_triangle_task(o);
    } else if (task == "doubling-tree") {
        v = verify_doubling(o, true);
    } else if (task == "doubling-blocks") {
        v = verify_doubling(o, false);
    } else {
        v = verify_facts();
    }
    std::cout << v.message << '\n';
    if (!o.manifest.empty()) {
        Manifest m("verify " + task);
        m.doc["parameters"] = {{"eps", o.eps}, {"seed", o.seed}};
        if (!o.points.empty()) m.file("points", o.points);
        if (!o.graph.empty()) m.file("graph", o.graph);
        m.doc["result"] = {{"passed", v.passed}, {"message", v.message}, {"detail", v.detail}};
        m.save(o.manifest);
    }
    return v.passed ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    std::vector<std::size_t> sizes{250, 500, 1000, 2000};
    std::vector<std::string> algos{"net", "net-naive", "theta", "merged"};
    double eps = 1.0;
    std::size_t d = 2, queries = 200;
    std::uint64_t seed = 0;
    int repeats = 1;
    int threads = 0;
    std::string out;
};

int cmd_bench(const BenchOptions& o) {
    const unsigned threads = threads_from(o.threads);
    std::ostringstream csv;
    csv << "n,eps,d,algo,edges,build_ms,mean_hops,mean_dist_computations,p99_dist_computations\n";
    for (std::size_t n : o.sizes) {
        PointFile pf;
        pf.dim = o.d;
        pf.coords = uniform_points(n, o.d, o.seed + n);
        const PointSet<EuclideanL2> points(pf.coords);
        const double dmin = exact_extremes(EuclideanL2{o.d}, points).dmin;
        const auto protocol = query_protocol(points, o.eps, dmin, o.queries, 0, o.seed);
        const std::vector<Coords> queries(protocol.begin() + static_cast<std::ptrdiff_t>(n), protocol.end());
        for (const std::string& algo : o.algos) {
            BuildOptions bo;
            bo.eps = o.eps;
            bo.seed = o.seed;
            bo.repeats = o.repeats;
            const auto start = Clock::now();
            const Built b = build_graph(algo, pf, bo, threads);
            const double ms = elapsed_ms(start);
            std::mt19937_64 rng(splitmix64(o.seed ^ n));
            std::uniform_int_distribution<Index> pick(0, static_cast<Index>(n - 1));
            std::vector<std::uint64_t> comps;
            double hops = 0.0;
            for (const Coords& q : queries) {
                const SearchTrace tr = greedy_search(b.graph, EuclideanL2{o.d}, points, pick(rng), q);
                hops += static_cast<double>(tr.hops.size() - 1);
                comps.push_back(tr.distance_computations);
            }
            std::sort(comps.begin(), comps.end());
            double mean_comps = 0.0;
            for (auto c : comps) mean_comps += static_cast<double>(c);
            const double count = static_cast<double>(std::max<std::size_t>(comps.size(), 1));
            const std::size_t rank = comps.empty() ? 0 : (comps.size() * 99 + 99) / 100 - 1;
            csv << n << ',' << format_double(o.eps) << ',' << o.d << ',' << algo << ',' << b.graph.edge_count()
                << ',' << format_double(ms) << ',' << format_double(hops / count) << ','
                << format_double(mean_comps / count) << ',' << (comps.empty() ? 0 : comps[rank]) << '\n';
        }
    }
    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(o.out, [&](std::ostream& out) { out << csv.str(); });
        std::cout << "wrote " << o.out << '\n';
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anncli: build and verify navigable proximity graphs"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: NAVGRAPH_THREADS, else 1)")
        ->check(CLI::NonNegativeNumber);

    int status = kExitPass;

    // gen
    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a point file");
    gen_cmd->require_subcommand(1);
    auto* gen_uniform = gen_cmd->add_subcommand("uniform", "Uniform points in [0, side]^d");
    gen_uniform->add_option("--n", gen.n, "Point count")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
    gen_uniform->add_option("--d", gen.d, "Dimension")->check(CLI::Range(1, 64));
    gen_uniform->add_option("--seed", gen.seed, "Random seed");
    gen_uniform->add_option("--side", gen.side, "Cube side length")->check(CLI::PositiveNumber);
    auto* gen_tree = gen_cmd->add_subcommand("tree", "Tree-metric hard instance");
    gen_tree->add_option("--n", gen.n, "Subtree leaves (power of 2)")->required();
    gen_tree->add_option("--delta", gen.delta, "Aspect ratio (power of 2)")->required();
    auto* gen_blocks = gen_cmd->add_subcommand("blocks", "Block hard instance");
    gen_blocks->add_option("--s", gen.s, "Block side")->required();
    gen_blocks->add_option("--t", gen.t, "Block count")->required();
    gen_blocks->add_option("--d", gen.d, "Dimension")->required();
    for (auto* sub : {gen_uniform, gen_tree, gen_blocks}) {
        sub->add_option("-o,--out", gen.out, "Point file to write")->required();
        sub->add_option("--manifest", gen.manifest, "Manifest path (default: <out>.json)");
        sub->callback([&, sub] { status = cmd_gen(sub->get_name(), gen); });
    }

    // build
    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build a proximity graph");
    build_cmd->require_subcommand(1);
    for (const std::string algo : {"net", "net-naive", "theta", "merged"}) {
        auto* sub = build_cmd->add_subcommand(algo, "Build the " + algo + " graph");
        sub->add_option("--eps", build.eps, "Approximation parameter in (0, 1]");
        sub->add_option("-i,--in", build.in, "Point file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", build.out, "Graph file to write")->required();
        sub->add_option("--manifest", build.manifest, "Manifest path (default: <out>.json)");
        if (algo == "net" || algo == "net-naive") {
            sub->add_option("--metric", build.metric, "Coordinate metric")->check(CLI::IsMember({"l2", "linf"}));
        }
        if (algo == "merged") {
            sub->add_option("--z", build.z, "Sampling constant z in tau = min(1, z / log2 delta)")
                ->check(CLI::PositiveNumber);
            sub->add_option("--tau", build.tau, "Fixed sampling rate in (0, 1]");
            sub->add_option("--repeats", build.repeats, "Independent runs; the smallest graph is kept")
                ->check(CLI::PositiveNumber);
            sub->add_option("--seed", build.seed, "Seed of the first run");
        }
        sub->callback([&, algo] {
            build.threads = threads;
            status = cmd_build(algo, build);
        });
    }

    // query
    QueryOptions query;
    auto* query_cmd = app.add_subcommand("query", "Greedy search on a graph");
    query_cmd->add_option("--graph", query.graph, "Graph file")->required()->check(CLI::ExistingFile);
    query_cmd->add_option("--points", query.points, "Point file")->required()->check(CLI::ExistingFile);
    query_cmd->add_option("--q", query.q, "Query: comma-separated coordinates, or a leaf id");
    query_cmd->add_option("--queries", query.queries, "Point file of queries")->check(CLI::ExistingFile);
    query_cmd->add_option("--start", query.start, "Start vertex");
    query_cmd->add_option("--budget", query.budget, "Cap on distance computations");
    query_cmd->add_option("--metric", query.metric, "Coordinate metric")->check(CLI::IsMember({"l2", "linf"}));
    query_cmd->add_option("--trace", query.trace, "Write the first query's hop trace here");
    query_cmd->callback([&] { status = cmd_query(query); });

    // verify
    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run a verifier; exit 1 on failure");
    verify_cmd->require_subcommand(1);
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--manifest", verify.manifest, "Write a manifest with the verdict");
    };
    auto* v_nav = verify_cmd->add_subcommand("navigable", "Navigability over the standard query protocol");
    v_nav->add_option("--graph", verify.graph, "Graph file")->required()->check(CLI::ExistingFile);
    v_nav->add_option("--points", verify.points, "Point file")->required()->check(CLI::ExistingFile);
    v_nav->add_option("--eps", verify.eps, "Approximation parameter");
    v_nav->add_option("--random", verify.random, "Uniform random queries");
    v_nav->add_option("--perturbed", verify.perturbed, "Perturbed data-point queries");
    v_nav->add_option("--seed", verify.seed, "Query seed");
    v_nav->add_option("--metric", verify.metric, "Coordinate metric")->check(CLI::IsMember({"l2", "linf"}));
    auto* v_net = verify_cmd->add_subcommand("net-props", "Net hierarchy and edge-structure checks");
    v_net->add_option("--points", verify.points, "Point file")->required()->check(CLI::ExistingFile);
    v_net->add_option("--eps", verify.eps, "Approximation parameter");
    v_net->add_option("--metric", verify.metric, "Coordinate metric")->check(CLI::IsMember({"l2", "linf"}));
    auto* v_ftree = verify_cmd->add_subcommand("forced-tree", "Forced edges of the tree instance");
    auto* v_dtree = verify_cmd->add_subcommand("doubling-tree", "Two-ball covers on the tree instance");
    for (auto* sub : {v_ftree, v_dtree}) {
        sub->add_option("--n", verify.n, "Subtree leaves")->required();
        sub->add_option("--delta", verify.delta, "Aspect ratio")->required();
    }
    auto* v_fblocks = verify_cmd->add_subcommand("forced-blocks", "Forced pairs of the block instance");
    auto* v_dblocks = verify_cmd->add_subcommand("doubling-blocks", "1 + 2^d covers on the block instance");
    auto* v_tri = verify_cmd->add_subcommand("triangle", "Exhaustive triangle check (point file or blocks)");
    for (auto* sub : {v_fblocks, v_dblocks, v_tri}) {
        sub->add_option("--s", verify.s, "Block side");
        sub->add_option("--t", verify.t, "Block count");
        sub->add_option("--d", verify.d, "Dimension");
    }
    v_tri->add_option("--points", verify.points, "Point file")->check(CLI::ExistingFile);
    v_tri->add_option("--metric", verify.metric, "Coordinate metric")->check(CLI::IsMember({"l2", "linf"}));
    v_dblocks->add_option("--p-star", verify.p_star, "Index of p*");
    for (auto* sub : {v_dtree, v_dblocks}) {
        sub->add_option("--samples", verify.samples, "Sampled balls");
        sub->add_option("--seed", verify.seed, "Sampling seed");
    }
    auto* v_facts = verify_cmd->add_subcommand("facts-e", "Numeric checks of the three cone inequalities");
    for (auto* sub : {v_nav, v_net, v_ftree, v_dtree, v_fblocks, v_dblocks, v_tri, v_facts}) {
        add_common(sub);
        sub->callback([&, sub] {
            verify.threads = threads;
            status = cmd_verify(sub->get_name(), verify);
        });
    }

    // bench
    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Build and query benchmark, CSV output");
    bench_cmd->add_option("--sizes", bench.sizes, "Point counts")->delimiter(',');
    bench_cmd->add_option("--algos", bench.algos, "Algorithms")
        ->delimiter(',')
        ->check(CLI::IsMember({"net", "net-naive", "theta", "merged"}));
    bench_cmd->add_option("--eps", bench.eps, "Approximation parameter");
    bench_cmd->add_option("--d", bench.d, "Dimension")->check(CLI::Range(2, 3));
    bench_cmd->add_option("--queries", bench.queries, "Random queries per configuration");
    bench_cmd->add_option("--repeats", bench.repeats, "Runs for merged")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Seed");
    bench_cmd->add_option("-o,--out", bench.out, "CSV file (default: stdout)");
    bench_cmd->callback([&] {
        bench.threads = threads;
        status = cmd_bench(bench);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return status;
}

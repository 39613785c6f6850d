#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/search.hpp"

namespace navgraph {

/// Thrown for unreadable or malformed files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Point file contents. Coordinate files have dim >= 1 and fill `coords`;
/// abstract files (dim = 0) hold one element id per row in `ids`.
struct PointFile {
    std::size_t dim = 0;
    std::vector<Coords> coords;
    std::vector<std::uint64_t> ids;

    std::size_t size() const { return dim == 0 ? ids.size() : coords.size(); }
};

inline void write_points(std::ostream& out, const PointFile& pf) {
    out << pf.dim << ' ' << pf.size() << '\n';
    if (pf.dim == 0) {
        for (std::uint64_t id : pf.ids) out << id << '\n';
        return;
    }
    for (const Coords& p : pf.coords) {
        for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << format_double(p[k]);
        out << '\n';
    }
}

inline PointFile read_points(std::istream& in) {
    PointFile pf;
    std::size_t n = 0;
    if (!(in >> pf.dim >> n)) throw FormatError("point file: missing 'd n' header");
    if (pf.dim == 0) {
        pf.ids.resize(n);
        for (auto& id : pf.ids)
            if (!(in >> id)) throw FormatError("point file: expected " + std::to_string(n) + " element ids");
        return pf;
    }
    pf.coords.assign(n, Coords(pf.dim));
    for (auto& p : pf.coords)
        for (double& c : p)
            if (!(in >> c)) throw FormatError("point file: expected " + std::to_string(n) + " rows of " +
                                              std::to_string(pf.dim) + " coordinates");
    return pf;
}

inline void write_graph(std::ostream& out, const ProximityGraph& g) {
    out << g.size() << ' ' << g.edge_count() << '\n';
    for (Index v = 0; v < g.size(); ++v)
        for (Index u : g.out(v)) out << v << ' ' << u << '\n';
}

inline ProximityGraph read_graph(std::istream& in) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw FormatError("graph file: missing 'n m' header");
    std::vector<std::vector<Index>> lists(n);
    for (std::size_t e = 0; e < m; ++e) {
        std::uint64_t a = 0, b = 0;
        if (!(in >> a >> b)) throw FormatError("graph file: expected " + std::to_string(m) + " edges");
        if (a >= n || b >= n) throw FormatError("graph file: edge endpoint out of range");
        lists[a].push_back(static_cast<Index>(b));
    }
    return ProximityGraph::from_lists(std::move(lists));
}

inline void write_trace(std::ostream& out, const SearchTrace& trace) {
    for (const Hop& h : trace.hops) out << h.vertex << ' ' << format_double(h.distance) << '\n';
}

template <typename T, typename Reader>
T read_file(const std::string& path, Reader reader) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return reader(in);
}

template <typename Writer>
void write_file(const std::string& path, Writer writer) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    writer(out);
    if (!out) throw FormatError("write failed for " + path);
}

}  // namespace navgraph

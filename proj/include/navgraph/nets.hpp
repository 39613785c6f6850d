#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/metric.hpp"

namespace navgraph {

/// An r-net of P: members pairwise >= radius apart, and every point of P
/// within radius of some member. Members are indices into P, ascending.
struct Net {
    double radius = 0.0;
    std::vector<Index> members;
};

/// Y_0 .. Y_h where Y_i is a 2^i-net of P. Levels are built independently,
/// so Y_{i+1} need not be a subset of Y_i.
struct NetHierarchy {
    int h = 0;
    std::vector<Net> levels;

    double radius(int level) const { return std::ldexp(1.0, level); }
};

/// Relative slack when checking that the smallest inter-point distance is 2.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Greedy net: scan P in index order and keep p when every kept member is at
/// least r away.
template <Metric M>
Net greedy_r_net(const M& space, const PointSet<M>& points, double r) {
    if (!(r > 0.0)) throw std::domain_error("greedy_r_net: radius must be positive");
    Net net{r, {}};
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool separated = true;
        for (Index m : net.members) {
            if (space.distance(points[m], points[i]) < r) {
                separated = false;
                break;
            }
        }
        if (separated) net.members.push_back(static_cast<Index>(i));
    }
    return net;
}

struct NetViolation {
    enum class Kind { separation, covering, bad_member } kind;
    Index a = 0;  // first member, or the uncovered point
    Index b = 0;  // second member (separation only)
    double distance = 0.0;
};

inline std::string describe(const NetViolation& v) {
    switch (v.kind) {
    case NetViolation::Kind::separation:
        return "separation: members " + std::to_string(v.a) + " and " + std::to_string(v.b) +
               " are " + std::to_string(v.distance) + " apart";
    case NetViolation::Kind::covering:
        return "covering: point " + std::to_string(v.a) + " is " + std::to_string(v.distance) +
               " from its closest member";
    case NetViolation::Kind::bad_member:
        return "member index " + std::to_string(v.a) + " is not in P";
    }
    return {};
}

/// Exhaustive O(n * |net|) check of both net properties.
template <Metric M>
std::optional<NetViolation> verify_r_net(const M& space, const PointSet<M>& points, const Net& net) {
    for (Index m : net.members) {
        if (m >= points.size()) return NetViolation{NetViolation::Kind::bad_member, m, 0, 0.0};
    }
    for (std::size_t i = 0; i < net.members.size(); ++i) {
        for (std::size_t j = i + 1; j < net.members.size(); ++j) {
            const Index a = net.members[i];
            const Index b = net.members[j];
            if (a == b) continue;
            const double d = space.distance(points[a], points[b]);
            if (d < net.radius) return NetViolation{NetViolation::Kind::separation, a, b, d};
        }
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
        double closest = std::numeric_limits<double>::infinity();
        for (Index m : net.members) {
            closest = std::min(closest, space.distance(points[m], points[p]));
            if (closest <= net.radius) break;
        }
        if (closest > net.radius) {
            return NetViolation{NetViolation::Kind::covering, static_cast<Index>(p), 0, closest};
        }
    }
    return std::nullopt;
}

/// ceil(log2(x)) for x > 0, exact at powers of two.
inline int ceil_log2(double x) {
    int exp = 0;
    const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
    return mant == 0.5 ? exp - 1 : exp;
}

/// Throws unless the smallest inter-point distance is at least 2 (up to the
/// relative normalization tolerance). Returns the estimate it computed.
template <Metric M>
ExtremeEstimate require_normalized(const M& space, const PointSet<M>& points) {
    const ExtremeEstimate est = estimate_extremes(space, points);
    const double dmin = 2.0 * est.dmin_hat;
    if (dmin < 2.0 * (1.0 - kNormalizationTolerance)) {
        throw std::domain_error("point set is not normalized: minimum inter-point distance " +
                                std::to_string(dmin) + " < 2");
    }
    return est;
}

/// h = ceil(log2(dmax_hat)); level i is the greedy 2^i-net.
template <Metric M>
NetHierarchy build_net_hierarchy(const M& space, const PointSet<M>& points) {
    const ExtremeEstimate est = require_normalized(space, points);
    NetHierarchy hierarchy;
    hierarchy.h = std::max(0, ceil_log2(est.dmax_hat));
    hierarchy.levels.reserve(static_cast<std::size_t>(hierarchy.h) + 1);
    for (int i = 0; i <= hierarchy.h; ++i) {
        hierarchy.levels.push_back(greedy_r_net(space, points, hierarchy.radius(i)));
    }
    return hierarchy;
}

}  // namespace navgraph

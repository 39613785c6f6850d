#include <gtest/gtest.h>

#include "navgraph/nets.hpp"
#include "navgraph/random.hpp"

using namespace navgraph;

namespace {

PointSet<EuclideanL2> line(std::initializer_list<double> xs) {
    PointSet<EuclideanL2> out;
    for (double x : xs) out.push_back({x});
    return out;
}

}  // namespace

TEST(Nets, GreedyNetHandTraces) {
    EuclideanL2 space{1};
    const auto p = line({0, 2, 4});
    EXPECT_EQ(greedy_r_net(space, p, 2.0).members, (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(greedy_r_net(space, p, 3.0).members, (std::vector<Index>{0, 2}));
    EXPECT_EQ(greedy_r_net(space, line({7}), 5.0).members, (std::vector<Index>{0}));
    EXPECT_THROW(greedy_r_net(space, p, 0.0), std::domain_error);
}

TEST(Nets, VerifierFindsUncoveredPoint) {
    EuclideanL2 space{1};
    const auto p = line({0, 100});
    const auto v = verify_r_net(space, p, Net{2.0, {0}});
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->kind, NetViolation::Kind::covering);
    EXPECT_EQ(v->a, 1U);
    EXPECT_FALSE(verify_r_net(space, p, Net{2.0, {0, 1}}).has_value());
    const auto sep = verify_r_net(space, line({0, 1}), Net{2.0, {0, 1}});
    ASSERT_TRUE(sep.has_value());
    EXPECT_EQ(sep->kind, NetViolation::Kind::separation);
}

TEST(Nets, GreedyNetPassesVerifierOnRandomPoints) {
    EuclideanL2 space{2};
    const auto pts = uniform_points(500, 2, 3, 20.0);
    for (double r : {0.3, 1.7, 5.0}) {
        const Net net = greedy_r_net(space, pts, r);
        const auto v = verify_r_net(space, pts, net);
        EXPECT_FALSE(v.has_value()) << (v ? describe(*v) : "");
    }
}

TEST(Nets, CeilLog2IsExactAtPowersOfTwo) {
    EXPECT_EQ(ceil_log2(1.0), 0);
    EXPECT_EQ(ceil_log2(2.0), 1);
    EXPECT_EQ(ceil_log2(3.0), 2);
    EXPECT_EQ(ceil_log2(4.0), 2);
    EXPECT_EQ(ceil_log2(4.000001), 3);
    EXPECT_EQ(ceil_log2(0.5), -1);
    EXPECT_EQ(ceil_log2(0.75), 0);
}

TEST(Nets, HierarchyHandTraces) {
    EuclideanL2 space{1};
    const auto four = line({0, 2, 4, 8});
    const NetHierarchy a = build_net_hierarchy(space, four);
    EXPECT_EQ(a.h, 4);
    ASSERT_EQ(a.levels.size(), 5U);
    EXPECT_EQ(a.levels[0].members, (std::vector<Index>{0, 1, 2, 3}));
    for (int i = 0; i <= a.h; ++i) EXPECT_FALSE(verify_r_net(space, four, a.levels[i]).has_value());

    const NetHierarchy b = build_net_hierarchy(space, line({0, 2}));
    EXPECT_EQ(b.h, 2);
    EXPECT_EQ(b.levels[0].members, (std::vector<Index>{0, 1}));
    EXPECT_EQ(b.levels[1].members, (std::vector<Index>{0, 1}));
    EXPECT_EQ(b.levels[2].members, (std::vector<Index>{0}));
}

TEST(Nets, HierarchyRejectsUnnormalizedInput) {
    EuclideanL2 space{1};
    EXPECT_THROW(build_net_hierarchy(space, line({0, 1, 5})), std::domain_error);
}

TEST(Nets, PackingCeilingOnRandomLevels) {
    EuclideanL2 space{2};
    auto pts = uniform_points(400, 2, 11, 1.0);
    const Extremes e = exact_extremes(space, pts);
    for (auto& p : pts)
        for (double& c : p) c *= 2.0 / e.dmin;
    const NetHierarchy hier = build_net_hierarchy(space, pts);
    const double phi = 9.0;
    const double ceiling = std::pow(8.0 * 2.0 * phi, 2.0);
    for (int i = 0; i <= hier.h; ++i) {
        const auto& members = hier.levels[i].members;
        for (Index c = 0; c < pts.size(); c += 37) {
            std::size_t inside = 0;
            for (Index m : members)
                if (space.distance(pts[c], pts[m]) <= phi * hier.radius(i)) ++inside;
            EXPECT_LE(static_cast<double>(inside), ceiling);
        }
    }
}

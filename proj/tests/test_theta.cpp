#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

#include "navgraph/facts.hpp"
#include "navgraph/random.hpp"
#include "navgraph/search.hpp"
#include "navgraph/theta.hpp"

using namespace navgraph;

namespace {

Coords random_direction(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss;
    Coords x(dim);
    double len = 0.0;
    while (len < 1e-9) {
        for (double& c : x) c = gauss(rng);
        len = detail::norm(x);
    }
    for (double& c : x) c /= len;
    return x;
}

/// Independent oracle: every (p, cone) pair scanned with cone_contains and
/// nearest_point_on_ray, no point location.
ProximityGraph brute_force_theta(const PointSet<EuclideanL2>& points, const ConeFamily& family) {
    std::vector<std::vector<Index>> lists(points.size());
    for (Index p = 0; p < points.size(); ++p) {
        for (std::size_t id = 0; id < family.size(); ++id) {
            if (auto t = nearest_point_on_ray(points, p, family, id)) lists[p].push_back(*t);
        }
    }
    return ProximityGraph::from_lists(std::move(lists));
}

}  // namespace

TEST(Theta, QuadrantFamily) {
    const ConeFamily f = build_cone_family(2, std::numbers::pi / 2);
    ASSERT_EQ(f.size(), 4U);
    const Coords origin{0.0, 0.0};
    EXPECT_TRUE(cone_contains(f, 0, origin, origin));
    EXPECT_TRUE(cone_contains(f, 0, origin, {1.0, 1.0}));
    EXPECT_FALSE(cone_contains(f, 0, origin, {-1.0, 0.0}));
    EXPECT_TRUE(cone_contains(f, 0, {5.0, 5.0}, {6.0, 7.0}));
    EXPECT_FALSE(cone_contains(f, 0, {5.0, 5.0}, {4.0, 7.0}));
    EXPECT_NEAR(f.cones[0].ray[0], std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(f.cones[0].ray[1], std::sqrt(0.5), 1e-15);
}

TEST(Theta, PlanarSectorCounts) {
    EXPECT_EQ(build_cone_family(2, 1.0 / 32).size(), 202U);
    EXPECT_EQ(build_cone_family(2, 0.5 / 32).size(), 403U);
    EXPECT_EQ(build_cone_family(2, 0.25 / 32).size(), 805U);
    EXPECT_THROW(build_cone_family(2, 0.0), std::domain_error);
    EXPECT_THROW(build_cone_family(2, std::numbers::pi), std::domain_error);
    EXPECT_THROW(build_cone_family(4, 0.5), std::domain_error);
}

TEST(Theta, CubeGridIsMinimal) {
    for (double theta : {1.0, 0.3, 1.0 / 32}) {
        const ConeFamily f = build_cone_family(3, theta);
        const auto k = static_cast<std::size_t>(f.grid);
        EXPECT_EQ(f.size(), 12 * k * k);
        EXPECT_LE(f.max_angular_diameter, theta);
        if (k > 1) {
            EXPECT_GT(detail::face_max_diameter(detail::angular_ticks(f.grid - 1)), theta);
        }
    }
    EXPECT_EQ(build_cone_family(3, 1.0 / 32).size(), 80688U);
}

TEST(Theta, RandomDirectionsAreCovered) {
    std::mt19937_64 rng(17);
    for (const auto& [dim, theta] : {std::pair<std::size_t, double>{2, 1.0 / 32}, {3, 1.0 / 32}, {3, 0.4}}) {
        const ConeFamily f = build_cone_family(dim, theta);
        for (int s = 0; s < 100000; ++s) {
            const Coords x = random_direction(rng, dim);
            ASSERT_FALSE(cones_containing(f, x).empty()) << "dim " << dim;
        }
    }
}

TEST(Theta, PointLocationMatchesExhaustiveMembership) {
    std::mt19937_64 rng(4);
    for (const auto& [dim, theta] : {std::pair<std::size_t, double>{2, 0.3}, {3, 0.5}}) {
        const ConeFamily f = build_cone_family(dim, theta);
        for (int s = 0; s < 2000; ++s) {
            const Coords x = random_direction(rng, dim);
            std::vector<std::size_t> all;
            for (std::size_t id = 0; id < f.size(); ++id)
                if (cone_contains_direction(f, id, x)) all.push_back(id);
            EXPECT_EQ(cones_containing(f, x), all);
        }
    }
}

TEST(Theta, RaysLieInsideTheirCones) {
    for (const auto& [dim, theta] : {std::pair<std::size_t, double>{2, 1.0 / 32}, {3, 0.2}}) {
        const ConeFamily f = build_cone_family(dim, theta);
        for (std::size_t id = 0; id < f.size(); ++id) {
            EXPECT_TRUE(cone_contains_direction(f, id, f.cones[id].ray)) << id;
            EXPECT_NEAR(detail::norm(f.cones[id].ray), 1.0, 1e-12);
        }
    }
}

TEST(Theta, SampledAngularDiameterWithinTheta) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    for (const auto& [dim, theta] : {std::pair<std::size_t, double>{2, 0.2}, {3, 0.3}}) {
        const ConeFamily f = build_cone_family(dim, theta);
        for (std::size_t id = 0; id < f.size(); id += 7) {
            std::vector<Coords> inside;
            while (inside.size() < 40) {
                Coords x = f.cones[id].ray;
                for (double& c : x) c += 0.3 * theta * gauss(rng);
                if (cone_contains_direction(f, id, x)) inside.push_back(x);
            }
            for (const Coords& a : inside)
                for (const Coords& b : inside) EXPECT_LE(detail::angle_between(a, b), theta + 1e-12);
        }
    }
}

TEST(Theta, NearestPointOnRayPrefersSmallerProjection) {
    // Sector of width pi/2 around +x, ray along +x.
    ConeFamily f;
    f.dim = 2;
    f.theta = std::numbers::pi / 2;
    f.grid = 1;
    const double c = std::sqrt(0.5);
    f.cones.push_back(Cone{{{c, c}, {c, -c}}, {1.0, 0.0}});
    const PointSet<EuclideanL2> pts{{0.0, 0.0}, {1.0, 0.9}, {1.4, 0.0}};
    EXPECT_TRUE(cone_contains(f, 0, pts[0], pts[1]));
    EXPECT_TRUE(cone_contains(f, 0, pts[0], pts[2]));
    EXPECT_EQ(nearest_point_on_ray(pts, 0, f, 0), std::optional<Index>(1));

    // Same comparison with the winner strictly farther from the apex in L2.
    const PointSet<EuclideanL2> far{{0.0, 0.0}, {1.0, 0.99}, {1.4, 0.0}};
    EXPECT_TRUE(cone_contains(f, 0, far[0], far[1]));
    EXPECT_GT(EuclideanL2{2}.distance(far[0], far[1]), EuclideanL2{2}.distance(far[0], far[2]));
    EXPECT_EQ(nearest_point_on_ray(far, 0, f, 0), std::optional<Index>(1));

    const PointSet<EuclideanL2> lone{{0.0, 0.0}, {-3.0, 0.0}};
    EXPECT_FALSE(nearest_point_on_ray(lone, 0, f, 0).has_value());
    const PointSet<EuclideanL2> single{{0.0, 0.0}, {2.0, 0.5}};
    EXPECT_EQ(nearest_point_on_ray(single, 0, f, 0), std::optional<Index>(1));
    const PointSet<EuclideanL2> tie{{0.0, 0.0}, {1.0, 0.5}, {1.0, -0.5}};
    EXPECT_EQ(nearest_point_on_ray(tie, 0, f, 0), std::optional<Index>(1));
}

TEST(Theta, TwoPointsGetMutualEdges) {
    for (std::size_t dim : {2U, 3U}) {
        const PointSet<EuclideanL2> pts = uniform_points(2, dim, 5);
        const ThetaGraph g = build_theta_graph(pts, dim, 0.5);
        EXPECT_TRUE(g.graph.has_edge(0, 1));
        EXPECT_TRUE(g.graph.has_edge(1, 0));
        EXPECT_EQ(g.graph.provenance(), Provenance::theta);
    }
}

TEST(Theta, BuilderMatchesBruteForceOnGrid) {
    PointSet<EuclideanL2> grid;
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 5; ++y) grid.push_back({static_cast<double>(x), static_cast<double>(y)});
    const ThetaGraph g = build_theta_graph(grid, 2, std::numbers::pi / 2);
    EXPECT_EQ(g.graph, brute_force_theta(grid, g.family));
}

TEST(Theta, BuilderMatchesBruteForceOnRandomInput) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto p2 = uniform_points(150, 2, seed);
        const ThetaGraph g2 = build_theta_graph(p2, 2, 1.0 / 32);
        EXPECT_EQ(g2.graph, brute_force_theta(p2, g2.family));
        for (Index v = 0; v < p2.size(); ++v) EXPECT_LE(g2.graph.out_degree(v), g2.family.size());

        const auto p3 = uniform_points(60, 3, seed + 10);
        const ThetaGraph g3 = build_theta_graph(p3, 3, 0.4);
        EXPECT_EQ(g3.graph, brute_force_theta(p3, g3.family));
    }
}

TEST(Theta, ConeEdgesRecordTheSelectingCone) {
    const auto pts = uniform_points(80, 2, 3);
    const ThetaGraph g = build_theta_graph(pts, 2, 0.2);
    for (Index p = 0; p < pts.size(); ++p) {
        for (const ConeEdge& e : g.cone_edges[p]) {
            EXPECT_EQ(nearest_point_on_ray(pts, p, g.family, e.cone), std::optional<Index>(e.target));
        }
    }
}

TEST(Theta, EpsOver32GraphIsNavigable) {
    for (const auto& [dim, eps] : {std::pair<std::size_t, double>{2, 1.0}, {2, 0.5}, {3, 1.0}}) {
        const auto pts = uniform_points(dim == 2 ? 300 : 120, dim, 31 + dim);
        const ThetaGraph g = build_theta_graph(pts, dim, eps / 32);
        const double dmin = exact_extremes(EuclideanL2{dim}, pts).dmin;
        const auto queries = query_protocol(pts, eps, dmin, 300, 150, 77);
        const auto report = check_navigable(g.graph, EuclideanL2{dim}, pts, eps, queries);
        EXPECT_TRUE(report.passed()) << "dim " << dim << " eps " << eps;
    }
}

TEST(Facts, TanBound) {
    const FactReport r = check_tan_bound();
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.points, 100000U);
}

TEST(Facts, IsoscelesChord) {
    const FactReport r = check_isosceles_chord();
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.points, 100000U);
}

TEST(Facts, ConeSlack) {
    const FactReport r = check_cone_slack();
    EXPECT_TRUE(r.passed());
    EXPECT_GE(r.points, 100000U);
}

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navgraph/graph.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/parallel.hpp"

namespace navgraph {

/// A simplicial cone with apex at the origin: the intersection of d closed
/// halfspaces {x : normal . x >= 0}, plus its designated ray (unit vector).
struct Cone {
    std::vector<Coords> normals;
    Coords ray;
};

/// Cones of angular diameter at most theta whose union is R^d.
///
/// d = 2: ceil(2 pi / theta) equal sectors, ray along the bisector.
/// d = 3: each cube face is cut into a k x k grid that is uniform in angle,
/// each cell is split into two triangles, and every triangle spans the
/// simplicial cone through its three corners. The ray is the normalized sum
/// of the corner directions. Neighboring cones are built from bit-identical
/// corner vectors, so a point on a shared facet evaluates to exactly opposite
/// signs on the two sides and always lands in at least one of them.
struct ConeFamily {
    std::size_t dim = 2;
    double theta = 0.0;
    std::vector<Cone> cones;
    int grid = 0;              // sectors (d = 2) or cells per face edge (d = 3)
    std::vector<double> ticks; // d = 3: face-coordinate grid lines, size grid + 1
    double max_angular_diameter = 0.0;

    std::size_t size() const { return cones.size(); }
};

namespace detail {

inline double dot(const Coords& a, const Coords& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(const Coords& a) { return std::sqrt(dot(a, a)); }

inline Coords cross(const Coords& a, const Coords& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double angle_between(const Coords& a, const Coords& b) {
    if (a.size() == 2) {
        const double c = a[0] * b[1] - a[1] * b[0];
        return std::atan2(std::abs(c), dot(a, b));
    }
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

/// d = 3 membership slack, relative to |normal| * |x|. Lets facets that meet
/// at a corner overlap by a hair so rounding near a corner cannot leave a
/// direction uncovered.
inline constexpr double kConeSlack3d = 1e-12;

inline ConeFamily planar_family(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    int m = static_cast<int>(std::ceil(two_pi / theta));
    while (two_pi / m > theta) ++m;
    m = std::max(m, 3);
    ConeFamily family;
    family.dim = 2;
    family.theta = theta;
    family.grid = m;
    family.max_angular_diameter = two_pi / m;
    std::vector<Coords> boundary(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double a = two_pi * k / m;
        boundary[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
    }
    family.cones.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const Coords& lo = boundary[static_cast<std::size_t>(k)];
        const Coords& hi = boundary[static_cast<std::size_t>((k + 1) % m)];
        const double mid = two_pi * (k + 0.5) / m;
        Cone cone;
        cone.normals = {{-lo[1], lo[0]}, {hi[1], -hi[0]}};
        cone.ray = {std::cos(mid), std::sin(mid)};
        family.cones.push_back(std::move(cone));
    }
    return family;
}

/// Face axis a, sign s, face coordinates (u, v) on the other two axes.
inline Coords cube_point(int axis, int sign, double u, double v) {
    Coords c(3);
    c[static_cast<std::size_t>(axis)] = sign;
    c[static_cast<std::size_t>((axis + 1) % 3)] = u;
    c[static_cast<std::size_t>((axis + 2) % 3)] = v;
    return c;
}

inline std::vector<double> angular_ticks(int k) {
    std::vector<double> t(static_cast<std::size_t>(k) + 1);
    const double quarter = std::numbers::pi / 4.0;
    for (int j = 0; j <= k; ++j) t[static_cast<std::size_t>(j)] = std::tan(-quarter + j * (2.0 * quarter) / k);
    for (int j = 0; j <= k / 2; ++j) t[static_cast<std::size_t>(k - j)] = -t[static_cast<std::size_t>(j)];
    t.front() = -1.0;
    t.back() = 1.0;
    if (k % 2 == 0) t[static_cast<std::size_t>(k / 2)] = 0.0;
    return t;
}

inline Cone triangle_cone(const Coords& a, const Coords& b, const Coords& c) {
    Cone cone;
    const std::array<const Coords*, 3> v{&a, &b, &c};
    for (int e = 0; e < 3; ++e) {
        Coords n = cross(*v[static_cast<std::size_t>(e)], *v[static_cast<std::size_t>((e + 1) % 3)]);
        if (dot(n, *v[static_cast<std::size_t>((e + 2) % 3)]) < 0.0)
            for (double& x : n) x = -x;
        cone.normals.push_back(std::move(n));
    }
    Coords ray(3, 0.0);
    for (const Coords* p : v) {
        const double len = norm(*p);
        for (int k = 0; k < 3; ++k) ray[static_cast<std::size_t>(k)] += (*p)[static_cast<std::size_t>(k)] / len;
    }
    const double len = norm(ray);
    for (double& x : ray) x /= len;
    cone.ray = std::move(ray);
    return cone;
}

inline double triangle_diameter(const Coords& a, const Coords& b, const Coords& c) {
    return std::max({angle_between(a, b), angle_between(b, c), angle_between(a, c)});
}

inline double face_max_diameter(const std::vector<double>& t) {
    const int k = static_cast<int>(t.size()) - 1;
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const Coords c00 = cube_point(0, 1, t[i], t[j]);
            const Coords c10 = cube_point(0, 1, t[i + 1], t[j]);
            const Coords c01 = cube_point(0, 1, t[i], t[j + 1]);
            const Coords c11 = cube_point(0, 1, t[i + 1], t[j + 1]);
            worst = std::max({worst, triangle_diameter(c00, c10, c11), triangle_diameter(c00, c11, c01)});
        }
    }
    return worst;
}

inline ConeFamily cube_family(double theta) {
    int k = std::max(1, static_cast<int>(std::floor(std::numbers::pi / 2.0 / theta)));
    std::vector<double> t = angular_ticks(k);
    double diameter = face_max_diameter(t);
    while (diameter > theta) {
        ++k;
        t = angular_ticks(k);
        diameter = face_max_diameter(t);
    }
    ConeFamily family;
    family.dim = 3;
    family.theta = theta;
    family.grid = k;
    family.ticks = t;
    family.max_angular_diameter = diameter;
    family.cones.reserve(static_cast<std::size_t>(12 * k * k));
    for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {1, -1}) {
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    const Coords c00 = cube_point(axis, sign, t[i], t[j]);
                    const Coords c10 = cube_point(axis, sign, t[i + 1], t[j]);
                    const Coords c01 = cube_point(axis, sign, t[i], t[j + 1]);
                    const Coords c11 = cube_point(axis, sign, t[i + 1], t[j + 1]);
                    family.cones.push_back(triangle_cone(c00, c10, c11));
                    family.cones.push_back(triangle_cone(c00, c11, c01));
                }
            }
        }
    }
    return family;
}

inline std::size_t cube_cone_id(int axis, int sign, int i, int j, int tri, int k) {
    const int face = axis * 2 + (sign > 0 ? 0 : 1);
    return static_cast<std::size_t>(((face * k + i) * k + j) * 2 + tri);
}

}  // namespace detail

/// Yao-style cone family in d in {2, 3} with angular diameter <= theta.
inline ConeFamily build_cone_family(std::size_t dim, double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi)) {
        throw std::domain_error("cone angle theta must lie in (0, pi)");
    }
    if (dim == 2) return detail::planar_family(theta);
    if (dim == 3) return detail::cube_family(theta);
    throw std::domain_error("cone families are implemented for d in {2, 3}, got d = " + std::to_string(dim));
}

/// Whether direction x lies in cone `id` (apex at the origin).
inline bool cone_contains_direction(const ConeFamily& family, std::size_t id, const Coords& x) {
    const Cone& cone = family.cones.at(id);
    if (family.dim == 2) {
        for (const Coords& n : cone.normals)
            if (detail::dot(n, x) < 0.0) return false;
        return true;
    }
    const double scale = detail::norm(x);
    for (const Coords& n : cone.normals) {
        if (detail::dot(n, x) < -detail::kConeSlack3d * detail::norm(n) * scale) return false;
    }
    return true;
}

/// Membership of x in the apex-translated copy of cone `id`. The apex itself
/// belongs to every cone.
inline bool cone_contains(const ConeFamily& family, std::size_t id, const Coords& apex, const Coords& x) {
    if (apex.size() != family.dim || x.size() != family.dim) {
        throw std::domain_error("cone_contains: dimension mismatch");
    }
    Coords dir(family.dim);
    for (std::size_t k = 0; k < family.dim; ++k) dir[k] = x[k] - apex[k];
    return cone_contains_direction(family, id, dir);
}

/// Every cone that contains direction x (x != 0). Only cones near x's
/// location are tested, which is exact because cones overlap only along
/// their boundaries.
inline std::vector<std::size_t> cones_containing(const ConeFamily& family, const Coords& x) {
    std::vector<std::size_t> found;
    if (family.dim == 2) {
        const int m = family.grid;
        double a = std::atan2(x[1], x[0]);
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        int s = static_cast<int>(std::floor(a / (2.0 * std::numbers::pi) * m));
        s = std::clamp(s, 0, m - 1);
        for (int delta : {-1, 0, 1}) {
            const auto id = static_cast<std::size_t>(((s + delta) % m + m) % m);
            if (std::find(found.begin(), found.end(), id) == found.end() && cone_contains_direction(family, id, x)) {
                found.push_back(id);
            }
        }
        std::sort(found.begin(), found.end());
        return found;
    }
    const int k = family.grid;
    const double top = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    for (int axis = 0; axis < 3; ++axis) {
        const double xa = x[static_cast<std::size_t>(axis)];
        if (std::abs(xa) < top * (1.0 - 1e-9)) continue;
        for (int sign : {1, -1}) {
            if (xa * sign < 0.0 || (xa == 0.0)) continue;
            const double u = x[static_cast<std::size_t>((axis + 1) % 3)] / std::abs(xa);
            const double v = x[static_cast<std::size_t>((axis + 2) % 3)] / std::abs(xa);
            const auto locate = [&](double c) {
                const auto it = std::upper_bound(family.ticks.begin(), family.ticks.end(), c);
                return std::clamp(static_cast<int>(it - family.ticks.begin()) - 1, 0, k - 1);
            };
            const int ci = locate(u);
            const int cj = locate(v);
            for (int i = std::max(0, ci - 1); i <= std::min(k - 1, ci + 1); ++i) {
                for (int j = std::max(0, cj - 1); j <= std::min(k - 1, cj + 1); ++j) {
                    for (int tri = 0; tri < 2; ++tri) {
                        const std::size_t id = detail::cube_cone_id(axis, sign, i, j, tri, k);
                        if (cone_contains_direction(family, id, x)) found.push_back(id);
                    }
                }
            }
        }
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

/// Among points of P \ {p} inside p's copy of cone `id`, the one whose
/// projection onto the designated ray is closest to p. Ties go to the
/// smallest index; empty cones give nullopt.
inline std::optional<Index> nearest_point_on_ray(const PointSet<EuclideanL2>& points, Index p,
                                                 const ConeFamily& family, std::size_t id) {
    const Coords& ray = family.cones.at(id).ray;
    std::optional<Index> best;
    double best_proj = 0.0;
    for (Index x = 0; x < points.size(); ++x) {
        if (x == p || !cone_contains(family, id, points[p], points[x])) continue;
        double proj = 0.0;
        for (std::size_t k = 0; k < family.dim; ++k) proj += (points[x][k] - points[p][k]) * ray[k];
        if (!best || proj < best_proj) {
            best = x;
            best_proj = proj;
        }
    }
    return best;
}

struct ConeEdge {
    std::size_t cone = 0;
    Index target = 0;
};

/// theta-graph plus, per vertex, which cone selected each target.
struct ThetaGraph {
    ProximityGraph graph;
    ConeFamily family;
    std::vector<std::vector<ConeEdge>> cone_edges;
};

/// p -> p' whenever p' is the nearest point on ray of p in some non-empty
/// cone of p's translated family. Quadratic in n.
inline ThetaGraph build_theta_graph(const PointSet<EuclideanL2>& points, std::size_t dim, double theta,
                                    unsigned threads = 1) {
    for (const auto& p : points) {
        if (p.size() != dim) throw std::domain_error("build_theta_graph: point dimension mismatch");
    }
    ThetaGraph out;
    out.family = build_cone_family(dim, theta);
    const std::size_t n = points.size();
    std::vector<std::vector<Index>> lists(n);
    out.cone_edges.resize(n);
    parallel_for(n, threads, [&](std::size_t p) {
        struct Best {
            Index target;
            double proj;
        };
        std::vector<std::pair<std::size_t, Best>> best;  // (cone, best so far), kept sorted by cone
        Coords dir(dim);
        for (Index x = 0; x < n; ++x) {
            if (x == p) continue;
            for (std::size_t k = 0; k < dim; ++k) dir[k] = points[x][k] - points[p][k];
            for (std::size_t cone : cones_containing(out.family, dir)) {
                const double proj = detail::dot(dir, out.family.cones[cone].ray);
                auto it = std::lower_bound(best.begin(), best.end(), cone,
                                           [](const auto& e, std::size_t c) { return e.first < c; });
                if (it == best.end() || it->first != cone) {
                    best.insert(it, {cone, Best{x, proj}});
                } else if (proj < it->second.proj) {
                    it->second = Best{x, proj};
                }
            }
        }
        for (const auto& [cone, b] : best) {
            out.cone_edges[p].push_back({cone, b.target});
            lists[p].push_back(b.target);
        }
    });
    out.graph = ProximityGraph::from_lists(std::move(lists), Provenance::theta);
    return out;
}

}  // namespace navgraph

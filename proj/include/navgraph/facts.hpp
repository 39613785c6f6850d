#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

namespace navgraph {

/// A grid point where one of the cone-angle inequalities failed.
struct FactViolation {
    std::string fact;
    double x = 0.0;  // the angle (x or gamma)
    double y = 0.0;  // second grid coordinate (l or epsilon); 0 when unused
    double lhs = 0.0;
    double rhs = 0.0;
};

struct FactReport {
    std::string fact;
    std::size_t points = 0;
    std::optional<FactViolation> violation;

    bool passed() const { return !violation.has_value(); }
};

/// tan x <= 2x on `points` evenly spaced x in [0, 1/2], endpoints included.
inline FactReport check_tan_bound(std::size_t points = 100000) {
    FactReport r{"tan x <= 2x", 0, std::nullopt};
    for (std::size_t k = 0; k < points; ++k) {
        const double x = 0.5 * static_cast<double>(k) / static_cast<double>(points - 1);
        const double lhs = std::tan(x);
        const double rhs = 2.0 * x;
        ++r.points;
        if (!(lhs <= rhs)) {
            r.violation = FactViolation{r.fact, x, 0.0, lhs, rhs};
            return r;
        }
    }
    return r;
}

/// For a at the origin, b = l(1, 0), c = l(cos g, sin g): |bc| < l tan g.
/// Grid: `angles` values of g strictly inside (0, pi/2) times `lengths`
/// values of l in (0, 10].
inline FactReport check_isosceles_chord(std::size_t angles = 1000, std::size_t lengths = 100) {
    FactReport r{"L2(b, c) < l tan(gamma)", 0, std::nullopt};
    const double half_pi = std::acos(0.0);
    for (std::size_t i = 1; i <= angles; ++i) {
        const double g = half_pi * static_cast<double>(i) / static_cast<double>(angles + 1);
        for (std::size_t j = 1; j <= lengths; ++j) {
            const double l = 10.0 * static_cast<double>(j) / static_cast<double>(lengths);
            const double bx = l, by = 0.0;
            const double cx = l * std::cos(g), cy = l * std::sin(g);
            const double lhs = std::hypot(bx - cx, by - cy);
            const double rhs = l * std::tan(g);
            ++r.points;
            if (!(lhs < rhs)) {
                r.violation = FactViolation{r.fact, g, l, lhs, rhs};
                return r;
            }
        }
    }
    return r;
}

/// (2 + eps)(2 tan g + 1 - cos g) < eps for eps in (0, 1], g in [0, eps/32].
inline FactReport check_cone_slack(std::size_t eps_steps = 316, std::size_t angle_steps = 317) {
    FactReport r{"(2+eps)(2 tan(gamma) + 1 - cos(gamma)) < eps", 0, std::nullopt};
    for (std::size_t i = 1; i <= eps_steps; ++i) {
        const double eps = static_cast<double>(i) / static_cast<double>(eps_steps);
        for (std::size_t j = 0; j < angle_steps; ++j) {
            const double g = eps / 32.0 * static_cast<double>(j) / static_cast<double>(angle_steps - 1);
            const double lhs = (2.0 + eps) * (2.0 * std::tan(g) + 1.0 - std::cos(g));
            ++r.points;
            if (!(lhs < eps)) {
                r.violation = FactViolation{r.fact, g, eps, lhs, eps};
                return r;
            }
        }
    }
    return r;
}

}  // namespace navgraph

#pragma once

#include <vector>

namespace abcdq {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

/// Convex hull (Andrew monotone chain), counter-clockwise, no repeated
/// endpoint. Collinear input degenerates to its two extreme points.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Shoelace area of a simple polygon given as an ordered vertex list.
double polygon_area(const std::vector<Point>& polygon);

/// Largest pairwise distance over a convex hull (rotating calipers).
double hull_diameter(const std::vector<Point>& hull);

/// Point-in-polygon test (even-odd rule); boundary points count as inside.
bool point_in_polygon(const Point& p, const std::vector<Point>& polygon);

} // namespace abcdq

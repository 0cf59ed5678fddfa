#include "abcdquant/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace abcdq {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return hull;
}

double polygon_area(const std::vector<Point>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        twice += (poly[j].x + poly[i].x) * (poly[i].y - poly[j].y);
    return std::abs(twice) / 2.0;
}

double hull_diameter(const std::vector<Point>& hull) {
    const std::size_t n = hull.size();
    if (n < 2) return 0.0;
    if (n == 2) return std::sqrt(dist2(hull[0], hull[1]));

    // Antipodal pair walk over a CCW hull.
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % n];
        const Point edge{b.x - a.x, b.y - a.y};
        while (true) {
            const std::size_t jn = (j + 1) % n;
            const double adv = edge.x * (hull[jn].y - hull[j].y) -
                               edge.y * (hull[jn].x - hull[j].x);
            if (adv > 0) j = jn; else break;
        }
        best = std::max({best, dist2(a, hull[j]), dist2(b, hull[j])});
    }
    return std::sqrt(best);
}

bool point_in_polygon(const Point& p, const std::vector<Point>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[j];
        const Point& b = poly[i];
        // On-edge check keeps boundary points inside.
        const double c = cross(a, b, p);
        if (c == 0.0 &&
            p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
            p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y))
            return true;
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

} // namespace abcdq

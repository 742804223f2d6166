#include "vld/geometry.hpp"

#include <algorithm>
#include <limits>

namespace vld {

double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    a = std::fmod(a, two_pi);
    if (a <= -M_PI) a += two_pi;
    if (a > M_PI) a -= two_pi;
    return a;
}

bool polygon_is_ccw(const std::vector<Vec2>& poly) {
    return polygon_area(poly) > 0.0;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        s += a.cross(b);
    }
    return 0.5 * s;
}

bool polygon_is_convex(const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e1 = poly[(i + 1) % n] - poly[i];
        Vec2 e2 = poly[(i + 2) % n] - poly[(i + 1) % n];
        if (e1.cross(e2) <= 0.0) return false; // strict: no collinear runs
    }
    return true;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    double a = 0.0;
    Vec2 c{0, 0};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        double w = p.cross(q);
        a += w;
        c.x += (p.x + q.x) * w;
        c.y += (p.y + q.y) * w;
    }
    a *= 0.5;
    return {c.x / (6.0 * a), c.y / (6.0 * a)};
}

bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e = poly[(i + 1) % n] - poly[i];
        if (e.cross(p - poly[i]) < 0.0) return false;
    }
    return true;
}

Vec2 edge_outward_normal(const std::vector<Vec2>& poly, std::size_t edge) {
    const Vec2& a = poly[edge];
    const Vec2& b = poly[(edge + 1) % poly.size()];
    Vec2 e = (b - a).normalized();
    return {e.y, -e.x}; // CCW interior is left of the edge
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.dot(ab);
    if (len2 <= 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

static int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    double v = (b - a).cross(c - a);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

static bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& a0, const Vec2& a1,
                        const Vec2& b0, const Vec2& b1) {
    int o1 = orient(a0, a1, b0);
    int o2 = orient(a0, a1, b1);
    int o3 = orient(b0, b1, a0);
    int o4 = orient(b0, b1, a1);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a0, a1, b0)) return true;
    if (o2 == 0 && on_segment(a0, a1, b1)) return true;
    if (o3 == 0 && on_segment(b0, b1, a0)) return true;
    if (o4 == 0 && on_segment(b0, b1, a1)) return true;
    return false;
}

double segment_segment_distance(const Vec2& a0, const Vec2& a1,
                                const Vec2& b0, const Vec2& b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    double d = point_segment_distance(a0, b0, b1);
    d = std::min(d, point_segment_distance(a1, b0, b1));
    d = std::min(d, point_segment_distance(b0, a0, a1));
    d = std::min(d, point_segment_distance(b1, a0, a1));
    return d;
}

bool segment_intersects_polygon(const Vec2& a, const Vec2& b,
                                const std::vector<Vec2>& poly) {
    if (point_in_convex_polygon(a, poly) || point_in_convex_polygon(b, poly))
        return true;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_intersect(a, b, poly[i], poly[(i + 1) % n])) return true;
    }
    return false;
}

double segment_polygon_distance(const Vec2& a, const Vec2& b,
                                const std::vector<Vec2>& poly) {
    if (segment_intersects_polygon(a, b, poly)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, segment_segment_distance(a, b, poly[i],
                                                       poly[(i + 1) % n]));
    }
    return best;
}

double point_polygon_distance(const Vec2& p, const std::vector<Vec2>& poly) {
    if (point_in_convex_polygon(p, poly)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, point_segment_distance(p, poly[i],
                                                     poly[(i + 1) % n]));
    }
    return best;
}

bool ray_segment_intersect(const Vec2& o, const Vec2& d,
                           const Vec2& a, const Vec2& b,
                           double& t, double& s) {
    Vec2 e = b - a;
    double denom = d.cross(e);
    if (denom == 0.0) return false; // parallel
    Vec2 ao = a - o;
    t = ao.cross(e) / denom;
    s = ao.cross(d) / denom;
    return t >= 0.0 && s >= 0.0 && s <= 1.0;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 &&
               (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower &&
               (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace vld

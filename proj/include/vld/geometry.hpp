#pragma once

#include <cmath>
#include <vector>

namespace vld {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 normalized() const {
        double n = norm();
        return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec2 xy() const { return {x, y}; }
};

// wrap an angle to (-pi, pi]
double wrap_angle(double a);

// Convex polygon utilities. Footprints are CCW-ordered convex polygons; all
// functions below assume (and some verify) that ordering.
bool polygon_is_ccw(const std::vector<Vec2>& poly);
bool polygon_is_convex(const std::vector<Vec2>& poly);
double polygon_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);
bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly);

// outward unit normal of edge i (vertex i -> vertex i+1) of a CCW polygon
Vec2 edge_outward_normal(const std::vector<Vec2>& poly, std::size_t edge);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& a0, const Vec2& a1,
                                const Vec2& b0, const Vec2& b1);
bool segments_intersect(const Vec2& a0, const Vec2& a1,
                        const Vec2& b0, const Vec2& b1);

// 0 when the segment touches or enters the polygon
double segment_polygon_distance(const Vec2& a, const Vec2& b,
                                const std::vector<Vec2>& poly);
bool segment_intersects_polygon(const Vec2& a, const Vec2& b,
                                const std::vector<Vec2>& poly);
double point_polygon_distance(const Vec2& p, const std::vector<Vec2>& poly);

// Parametric distance t >= 0 along ray o + t*d (d need not be unit) to the
// segment [a, b]; returns false when the ray misses. s in [0, 1] is the hit
// position along the segment.
bool ray_segment_intersect(const Vec2& o, const Vec2& d,
                           const Vec2& a, const Vec2& b,
                           double& t, double& s);

// Monotone-chain convex hull, CCW, no collinear duplicates.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

} // namespace vld

#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace s3forge {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2&) const = default;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Point2 xy() const { return {x, y}; }
    bool operator==(const Point3&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline Point2 normalized(Point2 a) {
    double n = norm(a);
    return n > 0.0 ? Point2{a.x / n, a.y / n} : Point2{0.0, 0.0};
}

// wrap to [-pi, pi)
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a - kPi;
}

// shortest signed delta from `from` to `to`
inline double angle_delta(double from, double to) { return wrap_angle(to - from); }

struct Aabb2 {
    Point2 min{0.0, 0.0};
    Point2 max{0.0, 0.0};

    void expand(Point2 p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }
    bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
};

struct Aabb3 {
    Point3 min{0.0, 0.0, 0.0};
    Point3 max{0.0, 0.0, 0.0};

    void expand(const Point3& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        min.z = std::min(min.z, p.z);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
        max.z = std::max(max.z, p.z);
    }
    bool contains(const Point3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
               p.z >= min.z && p.z <= max.z;
    }
};

// Yaw-rotated 3D box, z-up world frame.
struct OrientedBox3 {
    Point3 center;
    std::array<double, 3> half_extents{0.5, 0.5, 0.5};
    double yaw = 0.0;  // CCW about z, in [-pi, pi)

    std::array<Point3, 8> corners() const;
    Aabb3 aabb() const;
    // xy footprint corners (CCW)
    std::array<Point2, 4> footprint() const;
    bool operator==(const OrientedBox3&) const = default;
};

// Rotated rectangle in the xy plane; the kernel-facing footprint form.
struct Rect2 {
    Point2 center;
    double hx = 0.0;
    double hy = 0.0;
    double cos_yaw = 1.0;
    double sin_yaw = 0.0;
};

inline Rect2 footprint_rect(const OrientedBox3& b) {
    return Rect2{b.center.xy(), b.half_extents[0], b.half_extents[1],
                 std::cos(b.yaw), std::sin(b.yaw)};
}

// --- polygon utilities ---------------------------------------------------

// signed shoelace area; positive for CCW
double signed_polygon_area(const std::vector<Point2>& poly);

// shoelace area, positive; throws GeometryError on <3 vertices
double polygon_area(const std::vector<Point2>& poly);

bool polygon_is_ccw(const std::vector<Point2>& poly);

// crossing-number test; boundary points count as inside
bool point_in_polygon(Point2 p, const std::vector<Point2>& poly);

// true if any two non-adjacent edges intersect
bool polygon_self_intersects(const std::vector<Point2>& poly);

Point2 polygon_centroid(const std::vector<Point2>& poly);

double point_segment_distance(Point2 p, Point2 a, Point2 b);

// distance to the polygon outline (0 on the boundary)
double point_polygon_boundary_distance(Point2 p, const std::vector<Point2>& poly);

// signed: positive inside, negative outside
double point_polygon_signed_distance(Point2 p, const std::vector<Point2>& poly);

// distance from point to rotated-rectangle footprint (0 inside)
double point_rect_distance(Point2 p, const Rect2& r);

// proper or touching intersection of segments ab and cd
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

// separating-axis test for two rotated rectangles
bool rects_overlap(const Rect2& a, const Rect2& b);

// scalar segment-vs-box test used by geometry paths that do not batch;
// hit means the open segment (p0,p1) passes through the box interior
bool segment_hits_box(const Point3& p0, const Point3& p1, const OrientedBox3& box);

}  // namespace s3forge

#include "s3forge/geom.hpp"

#include <algorithm>

#include "s3forge/errors.hpp"

namespace s3forge {

std::array<Point3, 8> OrientedBox3::corners() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    std::array<Point3, 8> out;
    int k = 0;
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1}) {
                double lx = ix * half_extents[0];
                double ly = iy * half_extents[1];
                double lz = iz * half_extents[2];
                out[k++] = Point3{center.x + c * lx - s * ly,
                                  center.y + s * lx + c * ly,
                                  center.z + lz};
            }
    return out;
}

Aabb3 OrientedBox3::aabb() const {
    auto cs = corners();
    Aabb3 box{cs[0], cs[0]};
    for (const auto& p : cs) box.expand(p);
    return box;
}

std::array<Point2, 4> OrientedBox3::footprint() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const double hx = half_extents[0], hy = half_extents[1];
    auto rot = [&](double lx, double ly) {
        return Point2{center.x + c * lx - s * ly, center.y + s * lx + c * ly};
    };
    return {rot(hx, hy), rot(-hx, hy), rot(-hx, -hy), rot(hx, -hy)};
}

double signed_polygon_area(const std::vector<Point2>& poly) {
    double acc = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        acc += cross(poly[j], poly[i]);
    return 0.5 * acc;
}

double polygon_area(const std::vector<Point2>& poly) {
    if (poly.size() < 3)
        throw GeometryError("polygon needs at least 3 vertices");
    return std::abs(signed_polygon_area(poly));
}

bool polygon_is_ccw(const std::vector<Point2>& poly) {
    return signed_polygon_area(poly) > 0.0;
}

bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = poly[i], b = poly[j];
        // boundary counts as inside
        if (point_segment_distance(p, a, b) < 1e-12) return true;
        if ((a.y > p.y) != (b.y > p.y) &&
            p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            inside = !inside;
    }
    return inside;
}

namespace {

int orientation_sign(Point2 a, Point2 b, Point2 c) {
    double v = cross(b - a, c - a);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    int o1 = orientation_sign(a, b, c);
    int o2 = orientation_sign(a, b, d);
    int o3 = orientation_sign(c, d, a);
    int o4 = orientation_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool polygon_self_intersects(const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    if (n < 4) return false;
    for (std::size_t i = 0; i < n; ++i) {
        Point2 a = poly[i], b = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (shared vertex)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Point2 c = poly[j], d = poly[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return true;
        }
    }
    return false;
}

Point2 polygon_centroid(const std::vector<Point2>& poly) {
    double area = 0.0;
    Point2 c{0.0, 0.0};
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double f = cross(poly[j], poly[i]);
        c.x += (poly[j].x + poly[i].x) * f;
        c.y += (poly[j].y + poly[i].y) * f;
        area += f;
    }
    if (std::abs(area) < 1e-15) return poly.empty() ? Point2{} : poly[0];
    return {c.x / (3.0 * area), c.y / (3.0 * area)};
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    Point2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 <= 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double point_polygon_boundary_distance(Point2 p, const std::vector<Point2>& poly) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        best = std::min(best, point_segment_distance(p, poly[j], poly[i]));
    return best;
}

double point_polygon_signed_distance(Point2 p, const std::vector<Point2>& poly) {
    double d = point_polygon_boundary_distance(p, poly);
    return point_in_polygon(p, poly) ? d : -d;
}

double point_rect_distance(Point2 p, const Rect2& r) {
    // rotate into the rectangle frame
    double dx = p.x - r.center.x;
    double dy = p.y - r.center.y;
    double lx = r.cos_yaw * dx + r.sin_yaw * dy;
    double ly = -r.sin_yaw * dx + r.cos_yaw * dy;
    double ex = std::max(std::abs(lx) - r.hx, 0.0);
    double ey = std::max(std::abs(ly) - r.hy, 0.0);
    return std::sqrt(ex * ex + ey * ey);
}

bool rects_overlap(const Rect2& a, const Rect2& b) {
    auto corners = [](const Rect2& r) {
        auto rot = [&](double lx, double ly) {
            return Point2{r.center.x + r.cos_yaw * lx - r.sin_yaw * ly,
                          r.center.y + r.sin_yaw * lx + r.cos_yaw * ly};
        };
        return std::array<Point2, 4>{rot(r.hx, r.hy), rot(-r.hx, r.hy),
                                     rot(-r.hx, -r.hy), rot(r.hx, -r.hy)};
    };
    auto ca = corners(a);
    auto cb = corners(b);
    auto separated_on = [](Point2 axis, const std::array<Point2, 4>& u,
                           const std::array<Point2, 4>& v) {
        double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
        for (auto p : u) {
            double s = dot(axis, p);
            umin = std::min(umin, s);
            umax = std::max(umax, s);
        }
        for (auto p : v) {
            double s = dot(axis, p);
            vmin = std::min(vmin, s);
            vmax = std::max(vmax, s);
        }
        return umax < vmin || vmax < umin;
    };
    const Point2 axes[4] = {{a.cos_yaw, a.sin_yaw},
                            {-a.sin_yaw, a.cos_yaw},
                            {b.cos_yaw, b.sin_yaw},
                            {-b.sin_yaw, b.cos_yaw}};
    for (auto ax : axes)
        if (separated_on(ax, ca, cb)) return false;
    return true;
}

bool segment_hits_box(const Point3& p0, const Point3& p1, const OrientedBox3& box) {
    // slab test in the box local frame; open interval keeps endpoint
    // touches (sample points on a neighbouring surface) from counting
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const double ox = p0.x - box.center.x, oy = p0.y - box.center.y, oz = p0.z - box.center.z;
    const double dxw = p1.x - p0.x, dyw = p1.y - p0.y, dzw = p1.z - p0.z;
    const double lox = c * ox + s * oy, loy = -s * ox + c * oy;
    const double ldx = c * dxw + s * dyw, ldy = -s * dxw + c * dyw;

    double tmin = 1e-9, tmax = 1.0 - 1e-9;
    const double o[3] = {lox, loy, oz};
    const double d[3] = {ldx, ldy, dzw};
    for (int ax = 0; ax < 3; ++ax) {
        const double h = box.half_extents[ax];
        if (std::abs(d[ax]) < 1e-15) {
            if (o[ax] < -h || o[ax] > h) return false;
            continue;
        }
        double t0 = (-h - o[ax]) / d[ax];
        double t1 = (h - o[ax]) / d[ax];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    return true;
}

}  // namespace s3forge

#include <cmath>
#include <queue>
#include <vector>

#include "s3forge/errors.hpp"
#include "s3forge/occupancy.hpp"

namespace s3forge {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Cell {
    Point2 c;
    double h;    // half size
    double d;    // signed distance from center to boundary
    double max;  // best radius attainable inside the cell

    Cell(Point2 c_, double h_, const std::vector<Point2>& poly)
        : c(c_), h(h_), d(point_polygon_signed_distance(c_, poly)), max(d + h_ * kSqrt2) {}
};

}  // namespace

InscribedCircle max_inscribed_circle(const std::vector<Point2>& polygon, double tol) {
    if (polygon.size() < 3) throw GeometryError("inscribed circle needs a polygon");
    if (!(tol > 0.0)) throw RangeError("tol must be positive");

    Aabb2 bb{polygon[0], polygon[0]};
    for (const auto& p : polygon) bb.expand(p);
    const double span = std::max(bb.width(), bb.height());
    if (span <= 0.0) throw GeometryError("degenerate polygon");

    const Point2 centroid = polygon_centroid(polygon);

    auto cmp = [](const Cell& a, const Cell& b) { return a.max < b.max; };
    std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> queue(cmp);

    const double h0 = std::min(bb.width(), bb.height()) / 2.0;
    for (double x = bb.min.x; x < bb.max.x; x += 2.0 * h0)
        for (double y = bb.min.y; y < bb.max.y; y += 2.0 * h0)
            queue.push(Cell({x + h0, y + h0}, h0, polygon));

    Cell best(centroid, 0.0, polygon);

    // leaves kept for the centroid tie-break among near-optimal centers
    std::vector<Cell> leaves;
    const double leaf_h = tol / 4.0;

    while (!queue.empty()) {
        Cell cell = queue.top();
        queue.pop();
        if (cell.max <= best.d - tol) continue;  // cannot reach the near-optimal band
        if (cell.d > best.d) best = cell;
        if (cell.h <= leaf_h) {
            leaves.push_back(cell);
            continue;
        }
        const double h = cell.h / 2.0;
        queue.push(Cell({cell.c.x - h, cell.c.y - h}, h, polygon));
        queue.push(Cell({cell.c.x + h, cell.c.y - h}, h, polygon));
        queue.push(Cell({cell.c.x - h, cell.c.y + h}, h, polygon));
        queue.push(Cell({cell.c.x + h, cell.c.y + h}, h, polygon));
    }

    InscribedCircle out{best.c, best.d};
    double best_centroid_d = distance(best.c, centroid);
    for (const auto& leaf : leaves) {
        if (leaf.d < best.d - tol) continue;
        const double cd = distance(leaf.c, centroid);
        if (cd < best_centroid_d - 1e-12) {
            best_centroid_d = cd;
            out.center = leaf.c;
            out.radius = leaf.d;
        }
    }
    if (out.radius <= 0.0) throw GeometryError("polygon has no interior");
    return out;
}

std::vector<Point2> corner_keypoints(const Room& room, double inset) {
    if (!(inset > 0.0)) throw RangeError("inset must be positive");
    const auto& poly = room.polygon;
    const std::size_t n = poly.size();
    std::vector<Point2> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 prev = poly[(i + n - 1) % n];
        const Point2 cur = poly[i];
        const Point2 next = poly[(i + 1) % n];
        const Point2 in_dir = normalized(cur - prev);   // incoming edge direction
        const Point2 out_dir = normalized(next - cur);  // outgoing edge direction
        const double turn = cross(in_dir, out_dir);
        if (turn <= 1e-9) continue;  // reflex or straight vertex: no wide-FoV corner
        // interior bisector; offset so both walls are cleared by `inset`
        const Point2 bisector = normalized(out_dir - in_dir);
        const double interior = kPi - std::acos(std::clamp(dot(in_dir, out_dir), -1.0, 1.0));
        const double sin_half = std::sin(interior / 2.0);
        if (sin_half < 1e-6) continue;
        out.push_back(cur + bisector * (inset / sin_half));
    }
    return out;
}

}  // namespace s3forge

// Independent test oracles. These deliberately re-derive results through
// different algorithms than the implementation under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "s3forge/geom.hpp"
#include "s3forge/occupancy.hpp"

namespace oracle {

using namespace s3forge;

// Plain Dijkstra over the same 8-connected move set (no heuristic). Cost is
// rebuilt from integer step counts so an equal-cost optimum produces the
// identical double.
inline std::optional<double> dijkstra_cost(const OccupancyGrid& grid, std::size_t start,
                                           std::size_t goal) {
    if (!grid.is_free(start) || !grid.is_free(goal)) return std::nullopt;
    const double kSqrt2 = 1.4142135623730951;
    const std::size_t n = grid.cell_count();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    // step counts (cardinal, diagonal) per node
    std::vector<std::pair<int, int>> steps(n, {0, 0});
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist[start] = 0.0;
    open.push({0.0, start});
    static constexpr int kMoves[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                         {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
    while (!open.empty()) {
        auto [d, cur] = open.top();
        open.pop();
        if (d > dist[cur] + 1e-15) continue;
        if (cur == goal) break;
        const int cx = grid.ix_of(cur), cy = grid.iy_of(cur);
        for (int m = 0; m < 8; ++m) {
            const int nx = cx + kMoves[m][0], ny = cy + kMoves[m][1];
            if (!grid.is_free(nx, ny)) continue;
            const bool diag = m >= 4;
            if (diag && (!grid.is_free(cx + kMoves[m][0], cy) ||
                         !grid.is_free(cx, cy + kMoves[m][1])))
                continue;
            const std::size_t nb = grid.index(nx, ny);
            const double nd = d + (diag ? kSqrt2 : 1.0);
            if (nd < dist[nb] - 1e-12) {
                dist[nb] = nd;
                steps[nb] = {steps[cur].first + !diag, steps[cur].second + diag};
                open.push({nd, nb});
            }
        }
    }
    if (!std::isfinite(dist[goal])) return std::nullopt;
    return (static_cast<double>(steps[goal].first) + kSqrt2 * steps[goal].second) *
           grid.cell_size();
}

// dense grid search for the maximum inscribed circle radius
inline double inscribed_radius_grid(const std::vector<Point2>& poly, double step) {
    Aabb2 bb{poly[0], poly[0]};
    for (const auto& p : poly) bb.expand(p);
    double best = 0.0;
    for (double y = bb.min.y; y <= bb.max.y; y += step)
        for (double x = bb.min.x; x <= bb.max.x; x += step) {
            const Point2 p{x, y};
            if (!point_in_polygon(p, poly)) continue;
            best = std::max(best, point_polygon_boundary_distance(p, poly));
        }
    return best;
}

// Face-crossing segment/box intersection: an endpoint strictly inside the
// box, or the segment crossing one of the six faces. Structured differently
// from the slab test under test.
inline bool segment_box_faces(const Point3& p0, const Point3& p1, const OrientedBox3& box) {
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    auto to_local = [&](const Point3& w) {
        const double dx = w.x - box.center.x, dy = w.y - box.center.y;
        return Point3{c * dx + s * dy, -s * dx + c * dy, w.z - box.center.z};
    };
    const Point3 a = to_local(p0), b = to_local(p1);
    const double h[3] = {box.half_extents[0], box.half_extents[1], box.half_extents[2]};
    auto coord = [](const Point3& p, int ax) { return ax == 0 ? p.x : (ax == 1 ? p.y : p.z); };
    auto inside = [&](const Point3& p) {
        return std::abs(p.x) < h[0] && std::abs(p.y) < h[1] && std::abs(p.z) < h[2];
    };
    if (inside(a) || inside(b)) return true;
    for (int ax = 0; ax < 3; ++ax) {
        const double da = coord(a, ax), db = coord(b, ax);
        for (double plane : {-h[ax], h[ax]}) {
            const double denom = db - da;
            if (std::abs(denom) < 1e-18) continue;
            const double t = (plane - da) / denom;
            if (t <= 0.0 || t >= 1.0) continue;
            bool ok = true;
            for (int o = 0; o < 3; ++o) {
                if (o == ax) continue;
                const double v = coord(a, o) + t * (coord(b, o) - coord(a, o));
                if (std::abs(v) > h[o]) ok = false;
            }
            if (ok) return true;
        }
    }
    return false;
}

// Monte-Carlo polygon area estimate over the bounding box
template <typename RngT>
double polygon_area_mc(const std::vector<Point2>& poly, RngT& rng, int samples) {
    Aabb2 bb{poly[0], poly[0]};
    for (const auto& p : poly) bb.expand(p);
    int in = 0;
    for (int i = 0; i < samples; ++i) {
        const Point2 p{rng.uniform(bb.min.x, bb.max.x), rng.uniform(bb.min.y, bb.max.y)};
        in += point_in_polygon(p, poly);
    }
    return bb.width() * bb.height() * static_cast<double>(in) / samples;
}

}  // namespace oracle

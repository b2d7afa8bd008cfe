#include "s3forge/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "s3forge/errors.hpp"
#include "s3forge/kernels.hpp"

namespace s3forge {

std::size_t OccupancyGrid::free_count() const {
    std::size_t n = 0;
    for (auto c : cells_) n += (c == 0);
    return n;
}

std::optional<std::size_t> OccupancyGrid::nearest_free(Point2 p) const {
    std::optional<std::size_t> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] != 0) continue;
        Point2 c = cell_center(i);
        double d2 = (c.x - p.x) * (c.x - p.x) + (c.y - p.y) * (c.y - p.y);
        if (d2 < best_d2 - 1e-15) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

bool OccupancyGrid::line_of_sight(Point2 a, Point2 b) const {
    // Amanatides-Woo traversal
    auto ca = cell_of(a);
    auto cb = cell_of(b);
    if (!ca || !cb) return false;
    int ix = ix_of(*ca), iy = iy_of(*ca);
    const int gx = ix_of(*cb), gy = iy_of(*cb);
    if (!is_free(*ca) || !is_free(*cb)) return false;

    const double dx = b.x - a.x, dy = b.y - a.y;
    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

    auto boundary = [&](double origin_c, int i, int step) {
        return origin_c + (i + (step > 0 ? 1 : 0)) * cell_size_;
    };
    double t_max_x = step_x != 0
                         ? (boundary(origin_.x, ix, step_x) - a.x) / dx
                         : std::numeric_limits<double>::infinity();
    double t_max_y = step_y != 0
                         ? (boundary(origin_.y, iy, step_y) - a.y) / dy
                         : std::numeric_limits<double>::infinity();
    const double t_dx = step_x != 0 ? cell_size_ / std::abs(dx)
                                    : std::numeric_limits<double>::infinity();
    const double t_dy = step_y != 0 ? cell_size_ / std::abs(dy)
                                    : std::numeric_limits<double>::infinity();

    while (ix != gx || iy != gy) {
        if (t_max_x < t_max_y) {
            ix += step_x;
            t_max_x += t_dx;
        } else if (t_max_y < t_max_x) {
            iy += step_y;
            t_max_y += t_dy;
        } else {
            // exact corner crossing: both neighbours must be passable
            if (!is_free(ix + step_x, iy) || !is_free(ix, iy + step_y)) return false;
            ix += step_x;
            iy += step_y;
            t_max_x += t_dx;
            t_max_y += t_dy;
        }
        if (!in_bounds(ix, iy) || !is_free(index(ix, iy))) return false;
    }
    return true;
}

std::string OccupancyGrid::to_pgm() const {
    std::string out = "P5\n" + std::to_string(width_) + " " + std::to_string(height_) + "\n255\n";
    out.reserve(out.size() + cells_.size());
    for (int iy = height_ - 1; iy >= 0; --iy)
        for (int ix = 0; ix < width_; ++ix)
            out.push_back(is_free(index(ix, iy)) ? static_cast<char>(255) : static_cast<char>(0));
    return out;
}

OccupancyGrid rasterize(const Scene& scene, double cell_size, double clearance) {
    if (cell_size <= 0.0) throw RangeError("cell_size must be positive");
    if (clearance < 0.0) throw RangeError("clearance must be non-negative");

    const Aabb3& b = scene.bounds();
    const int width = std::max(1, static_cast<int>(std::ceil((b.max.x - b.min.x) / cell_size)));
    const int height = std::max(1, static_cast<int>(std::ceil((b.max.y - b.min.y) / cell_size)));
    OccupancyGrid grid({b.min.x, b.min.y}, cell_size, width, height);

    // outside every room -> BLOCKED
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        Point2 c = grid.cell_center(i);
        bool inside = false;
        for (const auto& room : scene.rooms())
            if (point_in_polygon(c, room.polygon)) {
                inside = true;
                break;
            }
        if (!inside) grid.set_blocked(i);
    }

    // within clearance of any opaque footprint -> BLOCKED
    const auto& opaque = scene.opaque_set();
    const auto& k = kernels::active();
    const double clear2 = clearance * clearance;
    std::vector<double> xs(width), ys(width), d2(width);
    for (int ix = 0; ix < width; ++ix)
        xs[ix] = grid.origin().x + (ix + 0.5) * cell_size;

    for (std::size_t bi = 0; bi < opaque.size(); ++bi) {
        Rect2 rect;
        rect.center = {opaque.cx[bi], opaque.cy[bi]};
        rect.hx = opaque.hx[bi];
        rect.hy = opaque.hy[bi];
        rect.cos_yaw = opaque.cos_yaw[bi];
        rect.sin_yaw = opaque.sin_yaw[bi];
        // restrict to rows/cols the inflated footprint can reach
        const double pad = clearance + cell_size;
        int ix0 = std::max(0, static_cast<int>((opaque.bx0[bi] - pad - b.min.x) / cell_size));
        int ix1 = std::min(width - 1, static_cast<int>((opaque.bx1[bi] + pad - b.min.x) / cell_size));
        int iy0 = std::max(0, static_cast<int>((opaque.by0[bi] - pad - b.min.y) / cell_size));
        int iy1 = std::min(height - 1, static_cast<int>((opaque.by1[bi] + pad - b.min.y) / cell_size));
        if (ix0 > ix1) continue;
        const std::size_t span = static_cast<std::size_t>(ix1 - ix0 + 1);
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double y = grid.origin().y + (iy + 0.5) * cell_size;
            std::fill(ys.begin(), ys.begin() + span, y);
            k.rect_dist_sq(xs.data() + ix0, ys.data(), span, rect, d2.data());
            for (std::size_t j = 0; j < span; ++j)
                if (d2[j] <= clear2) grid.set_blocked(grid.index(ix0 + static_cast<int>(j), iy));
        }
    }

    if (grid.free_count() == 0)
        throw GeometryError("no FREE cell after rasterization (clearance too large?)");
    return grid;
}

}  // namespace s3forge

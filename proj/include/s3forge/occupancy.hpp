#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s3forge/scene.hpp"

namespace s3forge {

class OccupancyGrid {
public:
    OccupancyGrid(Point2 origin, double cell_size, int width, int height)
        : origin_(origin), cell_size_(cell_size), width_(width), height_(height),
          cells_(static_cast<std::size_t>(width) * height, 0) {}

    Point2 origin() const { return origin_; }
    double cell_size() const { return cell_size_; }
    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t cell_count() const { return cells_.size(); }

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * width_ + ix;
    }
    int ix_of(std::size_t idx) const { return static_cast<int>(idx % width_); }
    int iy_of(std::size_t idx) const { return static_cast<int>(idx / width_); }

    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width_ && iy >= 0 && iy < height_;
    }
    bool is_free(std::size_t idx) const { return cells_[idx] == 0; }
    bool is_free(int ix, int iy) const { return in_bounds(ix, iy) && is_free(index(ix, iy)); }
    void set_blocked(std::size_t idx) { cells_[idx] = 1; }

    Point2 cell_center(std::size_t idx) const {
        return {origin_.x + (ix_of(idx) + 0.5) * cell_size_,
                origin_.y + (iy_of(idx) + 0.5) * cell_size_};
    }
    std::optional<std::size_t> cell_of(Point2 p) const {
        int ix = static_cast<int>(std::floor((p.x - origin_.x) / cell_size_));
        int iy = static_cast<int>(std::floor((p.y - origin_.y) / cell_size_));
        if (!in_bounds(ix, iy)) return std::nullopt;
        return index(ix, iy);
    }

    std::size_t free_count() const;
    // nearest FREE cell center to p (squared-distance, lower index on ties)
    std::optional<std::size_t> nearest_free(Point2 p) const;

    // grid line-of-sight: true when the segment crosses only FREE cells
    bool line_of_sight(Point2 a, Point2 b) const;

    // debug dump, P5 PGM: BLOCKED=0, FREE=255, row 0 at the top
    std::string to_pgm() const;

private:
    Point2 origin_;
    double cell_size_;
    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

// BLOCKED iff the cell center is within `clearance` of any opaque footprint
// (walls + furniture) or outside every room. Throws GeometryError when
// nothing remains FREE.
OccupancyGrid rasterize(const Scene& scene, double cell_size, double clearance);

struct GridPath {
    std::vector<std::size_t> cells;
    double cost = 0.0;  // meters, octile steps
};

// 8-connected A* with octile heuristic; no corner cutting (a diagonal move
// requires both adjacent cardinals FREE). Ties expand the lower cell index
// first. Throws NoPathError.
GridPath astar(const OccupancyGrid& grid, std::size_t start, std::size_t goal);

// pole-of-inaccessibility quadtree search; among cells within tol of the
// best radius, returns the one nearest the polygon centroid
struct InscribedCircle {
    Point2 center;
    double radius = 0.0;
};
InscribedCircle max_inscribed_circle(const std::vector<Point2>& polygon, double tol = 0.01);

// one keypoint per convex corner, offset along the interior bisector so it
// clears both walls by `inset`; reflex and straight vertices contribute none
std::vector<Point2> corner_keypoints(const Room& room, double inset);

// clamped B-spline (cubic, or degree n-1 when n < 4) through the first and
// last waypoint, sampled densely
std::vector<Point2> bspline_smooth(const std::vector<Point2>& waypoints,
                                   int samples_per_segment);

}  // namespace s3forge

#pragma once

#include <cstdint>
#include <optional>

#include "s3forge/scene.hpp"

namespace s3forge {

// Desk-scale scene synthesis: axis-aligned rectangular rooms in a strip,
// adjacent rooms connected by door gaps, objects placed collision-free.
// Deterministic in (seed, n_rooms, n_objects, params).
struct ToyParams {
    double min_room_side = 3.2;
    double max_room_side = 6.0;
    double door_width = 1.2;
    double object_wall_margin = 0.25;  // footprint distance to room walls
    double object_gap = 0.15;          // footprint-to-footprint separation
    double door_keepout = 1.0;         // objects stay this far from door centers
    int max_retries = 100;
    // pins every room to w x h (capacity tests)
    std::optional<Point2> fixed_room_size;
};

Scene gen_toy_scene(std::uint64_t seed, int n_rooms, int n_objects,
                    const ToyParams& params = {});

}  // namespace s3forge

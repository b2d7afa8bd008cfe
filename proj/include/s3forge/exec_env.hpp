#pragma once

#include <vector>

#include "s3forge/actions.hpp"
#include "s3forge/occupancy.hpp"
#include "s3forge/planner.hpp"
#include "s3forge/scene.hpp"

namespace s3forge {

struct ExecResult {
    std::vector<Pose> poses;  // frames after the start pose, times continue at 1/fps
    bool clamped = false;     // a translation stopped short of the requested distance
};

// Collision-aware action execution. Translations march straight in the
// heading (or its perpendicular) at v_max and stop eps=0.05 m before the
// first clearance violation; rotations cover 45/90/360 degrees at
// sweep_rate (scan_forward_90 turns -45 deg then sweeps +90 deg).
ExecResult execute(const Scene& scene, const OccupancyGrid& grid, const Pose& start,
                   const Action& action, const PlanConfig& config);

}  // namespace s3forge

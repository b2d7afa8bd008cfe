#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3forge/occupancy.hpp"
#include "s3forge/scene.hpp"

namespace s3forge {

enum class KeypointKind : std::uint8_t { Corner, CircleCenter, ObjectTarget };

const char* to_string(KeypointKind kind);

struct Keypoint {
    Point2 position;
    KeypointKind kind = KeypointKind::CircleCenter;
    int sweep_deg = 360;  // one of 90, 180, 360
    double facing = 0.0;  // sweep arc center for non-360 sweeps
    std::string room_id;
    std::string target_id;  // object targets only
};

struct PlanConfig {
    double fps = 24.0;
    double v_max = 1.0;          // m/s
    double turn_rate = 60.0;     // deg/s
    double sweep_rate = 60.0;    // deg/s
    double accel = 1.0;          // m/s^2, trapezoidal ramps
    int keypoint_budget = 6;
    double clearance = 0.25;     // m
    double camera_height = 1.5;  // m, pitch is fixed at 0
    double r_vis = 6.0;          // m, coverage range
    std::uint64_t seed = 0;
};

// Per room: the inscribed-circle center plus all valid corner insets; plus
// one standoff point per requested object. Positions are FREE on the grid.
std::vector<Keypoint> sample_keypoints(const Scene& scene, const OccupancyGrid& grid,
                                       const PlanConfig& config,
                                       const std::vector<std::string>& target_object_ids = {});

// Greedy marginal-coverage subset of size <= keypoint_budget. Coverage of a
// keypoint = FREE cells in line of sight within r_vis over its sweep arc.
// Equal marginal gains are broken uniformly at random from the seeded
// generator.
std::vector<Keypoint> select_keypoints(const std::vector<Keypoint>& candidates,
                                       const OccupancyGrid& grid,
                                       const CameraIntrinsics& intrinsics,
                                       const PlanConfig& config);

// Seeded random visit order, A* routing between keypoints, B-spline
// smoothing, trapezoidal time parameterization, sweep segments at each
// keypoint. Throws NoPathError when a keypoint pair is disconnected.
Trajectory plan(const Scene& scene, const OccupancyGrid& grid,
                const std::vector<Keypoint>& keypoints, const PlanConfig& config);

// Fraction of FREE cells seen (LOS, within r_vis, within the horizontal FoV)
// by at least one pose.
double coverage(const Trajectory& traj, const OccupancyGrid& grid,
                const CameraIntrinsics& intrinsics, double r_vis);

// coverage cell set of a single viewpoint over an arc (sweep_deg >= 360
// means all directions); used by selection and tests
std::vector<std::size_t> visible_cells(const OccupancyGrid& grid, Point2 from,
                                       double facing, double arc_deg, double r_vis);

}  // namespace s3forge

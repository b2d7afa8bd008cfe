#include "s3forge/exec_env.hpp"

#include <algorithm>
#include <cmath>

#include "s3forge/errors.hpp"
#include "s3forge/kernels.hpp"

namespace s3forge {

namespace {

constexpr double kStopEps = 0.05;

double min_footprint_distance(const Scene& scene, Point2 p) {
    const auto& opaque = scene.opaque_set();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < opaque.size(); ++i) {
        Rect2 rect{{opaque.cx[i], opaque.cy[i]},
                   opaque.hx[i],
                   opaque.hy[i],
                   opaque.cos_yaw[i],
                   opaque.sin_yaw[i]};
        best = std::min(best, point_rect_distance(p, rect));
    }
    return best;
}

bool violates(const Scene& scene, Point2 p, double clearance) {
    bool inside = false;
    for (const auto& room : scene.rooms())
        if (point_in_polygon(p, room.polygon)) {
            inside = true;
            break;
        }
    if (!inside) return true;
    return min_footprint_distance(scene, p) <= clearance;
}

// distance along the ray where the clearance band is first violated, capped
// at `limit`; bisected to sub-millimeter
double free_distance(const Scene& scene, Point2 from, Point2 dir, double limit,
                     double clearance) {
    const double step = 0.02;
    double good = 0.0;
    double s = step;
    while (s < limit) {
        if (violates(scene, from + dir * s, clearance)) break;
        good = s;
        s += step;
    }
    if (s >= limit) {
        if (!violates(scene, from + dir * limit, clearance)) return limit;
        s = limit;
    }
    double bad = s;
    for (int i = 0; i < 40; ++i) {
        const double mid = (good + bad) / 2.0;
        if (violates(scene, from + dir * mid, clearance)) bad = mid;
        else good = mid;
    }
    return good;
}

void emit_rotation(std::vector<Pose>& out, const Pose& start, double start_yaw,
                   double delta_rad, double t0_offset_frames, const PlanConfig& config) {
    const double rate = config.sweep_rate * kPi / 180.0;
    const double duration = std::abs(delta_rad) / rate;
    const auto frames = static_cast<std::size_t>(std::ceil(duration * config.fps - 1e-9));
    const double sign = delta_rad >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i <= frames; ++i) {
        const double tau = std::min(static_cast<double>(i) / config.fps, duration);
        Pose pose = start;
        pose.time_s = start.time_s + (t0_offset_frames + static_cast<double>(i)) / config.fps;
        pose.yaw = wrap_angle(start_yaw + sign * rate * tau);
        out.push_back(pose);
    }
}

}  // namespace

ExecResult execute(const Scene& scene, const OccupancyGrid& grid, const Pose& start,
                   const Action& action, const PlanConfig& config) {
    {
        auto cell = grid.cell_of(start.position.xy());
        if (!cell || !grid.is_free(*cell))
            throw GeometryError("execute() start pose is not collision-free");
    }

    ExecResult result;
    switch (action.kind) {
        case ActionKind::MoveForward:
        case ActionKind::MoveLeft:
        case ActionKind::MoveRight: {
            const double yaw = start.yaw;
            Point2 dir{std::cos(yaw), std::sin(yaw)};
            if (action.kind == ActionKind::MoveLeft) dir = {-dir.y, dir.x};
            if (action.kind == ActionKind::MoveRight) dir = {dir.y, -dir.x};

            const Point2 from = start.position.xy();
            const double stop =
                free_distance(scene, from, dir, action.distance_m + kStopEps, config.clearance);
            const double travel = std::max(0.0, std::min(action.distance_m, stop - kStopEps));
            result.clamped = travel < action.distance_m - 1e-9;

            const double duration = travel / config.v_max;
            const auto frames = static_cast<std::size_t>(std::ceil(duration * config.fps - 1e-9));
            for (std::size_t i = 1; i <= frames; ++i) {
                const double s = std::min(config.v_max * static_cast<double>(i) / config.fps,
                                          travel);
                Pose pose = start;
                pose.time_s = start.time_s + static_cast<double>(i) / config.fps;
                pose.position = {from.x + dir.x * s, from.y + dir.y * s, start.position.z};
                result.poses.push_back(pose);
            }
            break;
        }
        case ActionKind::RotateLeft45:
            emit_rotation(result.poses, start, start.yaw, kPi / 4.0, 0.0, config);
            break;
        case ActionKind::RotateRight45:
            emit_rotation(result.poses, start, start.yaw, -kPi / 4.0, 0.0, config);
            break;
        case ActionKind::Sweep360:
            emit_rotation(result.poses, start, start.yaw, kTwoPi, 0.0, config);
            break;
        case ActionKind::ScanForward90: {
            // turn to heading-45, then sweep to heading+45
            emit_rotation(result.poses, start, start.yaw, -kPi / 4.0, 0.0, config);
            const double phase1_frames = static_cast<double>(result.poses.size());
            emit_rotation(result.poses, start, start.yaw - kPi / 4.0, kPi / 2.0, phase1_frames,
                          config);
            break;
        }
    }
    return result;
}

}  // namespace s3forge

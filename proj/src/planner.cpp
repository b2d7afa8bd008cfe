#include "s3forge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "s3forge/errors.hpp"
#include "s3forge/rng.hpp"

namespace s3forge {

const char* to_string(KeypointKind kind) {
    switch (kind) {
        case KeypointKind::Corner: return "CORNER";
        case KeypointKind::CircleCenter: return "CIRCLE_CENTER";
        case KeypointKind::ObjectTarget: return "OBJECT_TARGET";
    }
    return "?";
}

std::vector<std::size_t> visible_cells(const OccupancyGrid& grid, Point2 from,
                                       double facing, double arc_deg, double r_vis) {
    std::vector<std::size_t> out;
    const double cs = grid.cell_size();
    const int ix0 = std::max(0, static_cast<int>((from.x - r_vis - grid.origin().x) / cs));
    const int ix1 = std::min(grid.width() - 1,
                             static_cast<int>((from.x + r_vis - grid.origin().x) / cs));
    const int iy0 = std::max(0, static_cast<int>((from.y - r_vis - grid.origin().y) / cs));
    const int iy1 = std::min(grid.height() - 1,
                             static_cast<int>((from.y + r_vis - grid.origin().y) / cs));
    const bool full_circle = arc_deg >= 360.0;
    const double half_arc = arc_deg * kPi / 360.0;
    const double r2 = r_vis * r_vis;
    for (int iy = iy0; iy <= iy1; ++iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
            const std::size_t idx = grid.index(ix, iy);
            if (!grid.is_free(idx)) continue;
            const Point2 c = grid.cell_center(idx);
            const double dx = c.x - from.x, dy = c.y - from.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > r2) continue;
            if (!full_circle && d2 > 1e-12) {
                const double bearing = std::atan2(dy, dx);
                if (std::abs(angle_delta(facing, bearing)) > half_arc + 1e-9) continue;
            }
            if (!grid.line_of_sight(from, c)) continue;
            out.push_back(idx);
        }
    }
    return out;
}

std::vector<Keypoint> sample_keypoints(const Scene& scene, const OccupancyGrid& grid,
                                       const PlanConfig& config,
                                       const std::vector<std::string>& target_object_ids) {
    std::vector<Keypoint> out;
    auto cell_free = [&](Point2 p) {
        auto c = grid.cell_of(p);
        return c && grid.is_free(*c);
    };

    for (const auto& room : scene.rooms()) {
        try {
            const InscribedCircle circle = max_inscribed_circle(room.polygon, 0.01);
            if (cell_free(circle.center))
                out.push_back({circle.center, KeypointKind::CircleCenter, 360, 0.0,
                               room.id, ""});
        } catch (const Error&) {
            // degenerate room polygon: no circle keypoint
        }
        const double inset =
            config.clearance + kWallThickness / 2.0 + 2.0 * grid.cell_size();
        const Point2 centroid = polygon_centroid(room.polygon);
        for (const Point2& corner : corner_keypoints(room, inset)) {
            if (!cell_free(corner)) continue;
            const double facing = std::atan2(centroid.y - corner.y, centroid.x - corner.x);
            out.push_back({corner, KeypointKind::Corner, 180, facing, room.id, ""});
        }
    }

    for (const auto& target_id : target_object_ids) {
        const SceneObject* obj = scene.find_object(target_id);
        if (!obj) continue;
        const Point2 oc = obj->box.center.xy();
        // nearest FREE cell at 1.0 m standoff from the object center
        std::optional<std::size_t> best;
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            if (!grid.is_free(i)) continue;
            const double err = std::abs(distance(grid.cell_center(i), oc) - 1.0);
            if (err < best_err - 1e-15) {
                best_err = err;
                best = i;
            }
        }
        if (!best) continue;
        const Point2 pos = grid.cell_center(*best);
        const double facing = std::atan2(oc.y - pos.y, oc.x - pos.x);
        out.push_back({pos, KeypointKind::ObjectTarget, 90, facing, obj->room_id, target_id});
    }
    return out;
}

std::vector<Keypoint> select_keypoints(const std::vector<Keypoint>& candidates,
                                       const OccupancyGrid& grid,
                                       const CameraIntrinsics& /*intrinsics*/,
                                       const PlanConfig& config) {
    Rng rng(derive_seed(config.seed, "select_keypoints"));
    const std::size_t budget = static_cast<std::size_t>(std::max(1, config.keypoint_budget));

    std::vector<std::vector<std::size_t>> cover(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        cover[i] = visible_cells(grid, candidates[i].position, candidates[i].facing,
                                 static_cast<double>(candidates[i].sweep_deg), config.r_vis);

    std::vector<std::uint8_t> covered(grid.cell_count(), 0);
    std::vector<std::size_t> remaining(candidates.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<Keypoint> selected;

    while (selected.size() < budget && !remaining.empty()) {
        std::size_t best_gain = 0;
        std::vector<std::size_t> ties;
        std::vector<std::size_t> gains(remaining.size(), 0);
        for (std::size_t r = 0; r < remaining.size(); ++r) {
            std::size_t gain = 0;
            for (std::size_t cell : cover[remaining[r]]) gain += !covered[cell];
            gains[r] = gain;
            if (gain > best_gain) best_gain = gain;
        }
        for (std::size_t r = 0; r < remaining.size(); ++r)
            if (gains[r] == best_gain) ties.push_back(r);
        const std::size_t pick = ties[rng.index(ties.size())];
        const std::size_t chosen = remaining[pick];
        for (std::size_t cell : cover[chosen]) covered[cell] = 1;
        selected.push_back(candidates[chosen]);
        remaining.erase(remaining.begin() + pick);
    }
    return selected;
}

namespace {

struct Leg {
    std::vector<Point2> points;   // smoothed, corridor-checked polyline
    std::vector<double> cum_len;  // same size
    double length = 0.0;
    double duration = 0.0;

    Point2 at(double s) const {
        auto it = std::upper_bound(cum_len.begin(), cum_len.end(), s);
        std::size_t hi = std::min<std::size_t>(it - cum_len.begin(), points.size() - 1);
        if (hi == 0) return points.front();
        const std::size_t lo = hi - 1;
        const double seg = cum_len[hi] - cum_len[lo];
        const double t = seg > 1e-12 ? (s - cum_len[lo]) / seg : 0.0;
        return points[lo] + (points[hi] - points[lo]) * t;
    }
    double tangent(double s) const {
        auto it = std::upper_bound(cum_len.begin(), cum_len.end(), s);
        std::size_t hi = std::min<std::size_t>(it - cum_len.begin(), points.size() - 1);
        if (hi == 0) hi = 1;
        const Point2 d = points[hi] - points[hi - 1];
        return std::atan2(d.y, d.x);
    }
};

// arc length covered at time tau of a rest-to-rest trapezoidal profile
double profile_s(double tau, double length, double v_max, double accel) {
    const double t_ramp_full = v_max / accel;
    if (length >= v_max * v_max / accel) {
        const double t_cruise = (length - v_max * v_max / accel) / v_max;
        const double total = 2.0 * t_ramp_full + t_cruise;
        tau = std::clamp(tau, 0.0, total);
        if (tau <= t_ramp_full) return 0.5 * accel * tau * tau;
        if (tau <= t_ramp_full + t_cruise)
            return 0.5 * accel * t_ramp_full * t_ramp_full + v_max * (tau - t_ramp_full);
        const double td = total - tau;
        return length - 0.5 * accel * td * td;
    }
    const double t_peak = std::sqrt(length / accel);
    const double total = 2.0 * t_peak;
    tau = std::clamp(tau, 0.0, total);
    if (tau <= t_peak) return 0.5 * accel * tau * tau;
    const double td = total - tau;
    return length - 0.5 * accel * td * td;
}

double profile_duration(double length, double v_max, double accel) {
    if (length >= v_max * v_max / accel) return length / v_max + v_max / accel;
    return 2.0 * std::sqrt(length / accel);
}

struct Phase {
    SegmentLabel label;
    double start = 0.0;
    double duration = 0.0;
    // sweep / align
    double yaw_from = 0.0;
    double yaw_rate = 0.0;  // rad/s, signed
    Point2 position;
    // move
    const Leg* leg = nullptr;
    bool sweep_start = false;
};

Leg build_leg(const OccupancyGrid& grid, Point2 from, Point2 to, const PlanConfig& config) {
    auto cs = grid.cell_of(from);
    auto cg = grid.cell_of(to);
    if (!cs || !cg || !grid.is_free(*cs) || !grid.is_free(*cg))
        throw NoPathError("keypoint not on FREE terrain");
    GridPath gp = astar(grid, *cs, *cg);

    // LOS shortcutting, segments capped so the spline stays near the corridor
    std::vector<Point2> waypoints;
    waypoints.push_back(from);
    const double max_seg = 2.0;
    std::size_t i = 0;
    while (i + 1 < gp.cells.size()) {
        std::size_t best = i + 1;
        for (std::size_t j = gp.cells.size() - 1; j > i; --j) {
            const Point2 a = grid.cell_center(gp.cells[i]);
            const Point2 b = grid.cell_center(gp.cells[j]);
            if (distance(a, b) <= max_seg && grid.line_of_sight(a, b)) {
                best = j;
                break;
            }
        }
        waypoints.push_back(grid.cell_center(gp.cells[best]));
        i = best;
    }
    waypoints.back() = to;
    if (waypoints.size() < 2) waypoints.push_back(to);

    double longest = 0.0;
    for (std::size_t k = 1; k < waypoints.size(); ++k)
        longest = std::max(longest, distance(waypoints[k - 1], waypoints[k]));
    const int samples = std::max(8, static_cast<int>(std::ceil(longest / (0.5 * grid.cell_size()))));
    std::vector<Point2> smooth = bspline_smooth(waypoints, samples);

    // corridor post-check: snap samples that left FREE space back to the
    // nearest FREE cell center
    for (auto& p : smooth) {
        auto c = grid.cell_of(p);
        if (c && grid.is_free(*c)) continue;
        auto snap = grid.nearest_free(p);
        if (snap) p = grid.cell_center(*snap);
    }

    // local re-plan: a snap can leave a gap whose straight segment still
    // crosses BLOCKED cells; splice the grid path back in there
    std::vector<Point2> repaired;
    repaired.push_back(smooth.front());
    for (std::size_t k = 1; k < smooth.size(); ++k) {
        const Point2 a = repaired.back();
        const Point2 b = smooth[k];
        const double len = distance(a, b);
        bool crosses_blocked = false;
        const int steps = static_cast<int>(std::ceil(len / (0.5 * grid.cell_size())));
        for (int s = 1; s < steps && !crosses_blocked; ++s) {
            const Point2 mid = a + (b - a) * (static_cast<double>(s) / steps);
            const auto cell = grid.cell_of(mid);
            if (!cell || !grid.is_free(*cell)) crosses_blocked = true;
        }
        if (crosses_blocked) {
            const auto ca = grid.cell_of(a);
            const auto cb = grid.cell_of(b);
            if (ca && cb) {
                const GridPath detour = astar(grid, *ca, *cb);
                for (std::size_t d = 1; d + 1 < detour.cells.size(); ++d)
                    repaired.push_back(grid.cell_center(detour.cells[d]));
            }
        }
        repaired.push_back(b);
    }

    Leg leg;
    for (const auto& p : repaired) {
        if (!leg.points.empty() && distance(leg.points.back(), p) < 1e-9) continue;
        leg.points.push_back(p);
    }
    if (leg.points.size() < 2) leg.points.push_back(leg.points.front() + Point2{1e-9, 0.0});
    leg.cum_len.resize(leg.points.size(), 0.0);
    for (std::size_t k = 1; k < leg.points.size(); ++k)
        leg.cum_len[k] = leg.cum_len[k - 1] + distance(leg.points[k - 1], leg.points[k]);
    leg.length = leg.cum_len.back();
    leg.duration = profile_duration(leg.length, config.v_max, config.accel);
    return leg;
}

}  // namespace

Trajectory plan(const Scene& scene, const OccupancyGrid& grid,
                const std::vector<Keypoint>& keypoints, const PlanConfig& config) {
    if (keypoints.empty()) throw RangeError("plan needs at least one keypoint");

    Rng rng(derive_seed(config.seed, "plan_visit_order"));
    std::vector<std::size_t> order(keypoints.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<Leg> legs;
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        legs.push_back(build_leg(grid, keypoints[order[i]].position,
                                 keypoints[order[i + 1]].position, config));

    const double sweep_rate = config.sweep_rate * kPi / 180.0;
    const double turn_rate = config.turn_rate * kPi / 180.0;

    std::vector<Phase> phases;
    double clock = 0.0;
    double yaw = legs.empty() ? 0.0 : legs.front().tangent(0.0);

    auto push = [&](Phase ph) {
        ph.start = clock;
        clock += ph.duration;
        phases.push_back(ph);
    };

    for (std::size_t i = 0; i < order.size(); ++i) {
        const Keypoint& kp = keypoints[order[i]];
        if (kp.sweep_deg > 0) {
            Phase sweep;
            sweep.label = SegmentLabel::Sweeping;
            sweep.duration = kp.sweep_deg * kPi / 180.0 / sweep_rate;
            sweep.yaw_from = yaw;
            sweep.yaw_rate = sweep_rate;  // CCW
            sweep.position = kp.position;
            sweep.sweep_start = true;
            push(sweep);
            yaw = wrap_angle(yaw + kp.sweep_deg * kPi / 180.0);
        }
        if (i + 1 < order.size()) {
            const Leg& leg = legs[i];
            const double tangent0 = leg.tangent(0.0);
            const double delta = angle_delta(yaw, tangent0);
            if (std::abs(delta) > 1e-9) {
                Phase align;
                align.label = SegmentLabel::Idle;
                align.duration = std::abs(delta) / turn_rate;
                align.yaw_from = yaw;
                align.yaw_rate = delta >= 0.0 ? turn_rate : -turn_rate;
                align.position = kp.position;
                push(align);
                yaw = tangent0;
            }
            Phase move;
            move.label = SegmentLabel::Moving;
            move.duration = leg.duration;
            move.position = kp.position;
            move.leg = &leg;
            push(move);
            yaw = leg.tangent(leg.length);
        }
    }

    const double total = clock;
    std::size_t frames = static_cast<std::size_t>(std::ceil(total * config.fps - 1e-9));
    frames = std::max<std::size_t>(frames, 2);

    Trajectory traj;
    traj.id = scene.id() + "_traj_" + std::to_string(config.seed);
    traj.scene_id = scene.id();
    traj.fps = config.fps;
    traj.poses.reserve(frames);
    traj.segment_labels.reserve(frames);

    for (const auto& ph : phases)
        if (ph.sweep_start)
            traj.keypoint_marks.push_back(std::min<std::size_t>(
                static_cast<std::size_t>(std::ceil(ph.start * config.fps - 1e-9)), frames - 1));

    const double max_yaw_step = std::max(turn_rate, sweep_rate) / config.fps;
    double yaw_state = legs.empty() ? 0.0 : legs.front().tangent(0.0);
    std::size_t phase_idx = 0;

    if (phases.empty()) {
        // single keypoint without a sweep: two resting frames
        for (std::size_t f = 0; f < 2; ++f) {
            Pose pose;
            pose.time_s = static_cast<double>(f) / config.fps;
            pose.position = {keypoints[order[0]].position.x, keypoints[order[0]].position.y,
                             config.camera_height};
            pose.yaw = yaw_state;
            traj.poses.push_back(pose);
            traj.segment_labels.push_back(SegmentLabel::Idle);
        }
        return traj;
    }

    for (std::size_t f = 0; f < frames; ++f) {
        const double t = static_cast<double>(f) / config.fps;
        while (phase_idx + 1 < phases.size() &&
               t >= phases[phase_idx].start + phases[phase_idx].duration - 1e-12)
            ++phase_idx;
        const Phase& ph = phases[phase_idx];

        Pose pose;
        pose.time_s = t;
        double yaw_target;
        const double tau = std::clamp(t - ph.start, 0.0, ph.duration);
        if (ph.leg) {
            const double s = profile_s(tau, ph.leg->length, config.v_max, config.accel);
            const Point2 p = ph.leg->at(s);
            pose.position = {p.x, p.y, config.camera_height};
            yaw_target = ph.leg->tangent(s);
        } else {
            pose.position = {ph.position.x, ph.position.y, config.camera_height};
            yaw_target = ph.yaw_from + ph.yaw_rate * tau;
        }
        const double step = angle_delta(yaw_state, wrap_angle(yaw_target));
        yaw_state = wrap_angle(yaw_state + std::clamp(step, -max_yaw_step, max_yaw_step));
        pose.yaw = yaw_state;
        traj.poses.push_back(pose);
        traj.segment_labels.push_back(ph.label);
    }
    return traj;
}

double coverage(const Trajectory& traj, const OccupancyGrid& grid,
                const CameraIntrinsics& intrinsics, double r_vis) {
    const std::size_t free_total = grid.free_count();
    if (free_total == 0 || traj.poses.empty()) return 0.0;

    std::vector<std::uint8_t> seen(grid.cell_count(), 0);
    for (const auto& pose : traj.poses) {
        for (std::size_t idx : visible_cells(grid, pose.position.xy(), pose.yaw,
                                             intrinsics.horizontal_fov_deg, r_vis))
            seen[idx] = 1;
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.cell_count(); ++i)
        if (seen[i] && grid.is_free(i)) ++count;
    return static_cast<double>(count) / static_cast<double>(free_total);
}

}  // namespace s3forge

// Brute-force re-derivation of generated answers straight from scene +
// visibility table, ignoring the generator's internal state. NUM answers
// must match within 1e-6 relative; MC answer indices exactly.
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "s3forge/errors.hpp"
#include "s3forge/qa.hpp"

namespace oracle {

using namespace s3forge;

struct QaCheck {
    bool ok = false;
    std::string detail;
};

inline QaCheck fail(const std::string& why) { return {false, why}; }

inline QaCheck check_num(double expected, const QAPair& p) {
    const double denom = std::max(std::abs(expected), 1e-12);
    if (std::abs(expected - p.answer_value) / denom <= 1e-6) return {true, ""};
    return fail("num mismatch: oracle " + std::to_string(expected) + " vs " +
                std::to_string(p.answer_value));
}

inline QaCheck check_mc(const std::string& expected_text, const QAPair& p) {
    if (p.answer_index < 0 || p.answer_index >= static_cast<int>(p.choices.size()))
        return fail("answer index out of range");
    if (p.choices[static_cast<std::size_t>(p.answer_index)] == expected_text) return {true, ""};
    return fail("mc mismatch: oracle '" + expected_text + "' vs '" +
                p.choices[static_cast<std::size_t>(p.answer_index)] + "'");
}

inline QaCheck recheck_pair(const QAPair& p, const GenContext& ctx) {
    const Scene& scene = ctx.scene;
    const Trajectory& traj = ctx.trajectory;
    const VisibilityTable& table = ctx.table;
    const std::size_t frame = traj.frame_at(p.timestamp_s);
    const Pose& pose = traj.poses[frame];

    auto obj = [&](const std::string& id) -> const SceneObject& {
        const SceneObject* o = scene.find_object(id);
        if (!o) throw ReferenceError("oracle: missing object " + id);
        return *o;
    };

    switch (p.task) {
        case TaskKind::Count: {
            const std::string cat = p.meta.at("category").get<std::string>();
            int n = 0;
            for (const auto& o : scene.objects()) {
                if (o.category != cat) continue;
                const auto fa = table.first_appearance(o.id);
                if (fa && *fa < frame) ++n;
            }
            return check_num(n, p);
        }
        case TaskKind::Attribute: {
            const auto& o = obj(p.refs.at(0));
            return check_num(2.0 * std::max({o.box.half_extents[0], o.box.half_extents[1],
                                             o.box.half_extents[2]}),
                             p);
        }
        case TaskKind::SpatialDistance: {
            const auto& a = obj(p.refs.at(0));
            const auto& b = obj(p.refs.at(1));
            return check_num(distance(a.box.center, b.box.center), p);
        }
        case TaskKind::CurrentRoomArea: {
            const auto room_id = scene.locate_room(pose.position.xy());
            if (!room_id) return fail("oracle: camera outside all rooms");
            return check_num(polygon_area(scene.find_room(*room_id)->polygon), p);
        }
        case TaskKind::CameraDisplacement: {
            const double w = p.meta.at("window_s").get<double>();
            const auto wf = static_cast<std::size_t>(std::floor(w * traj.fps + 0.5));
            if (frame < wf) return fail("oracle: window precedes start");
            return check_num(distance(pose.position, traj.poses[frame - wf].position), p);
        }
        case TaskKind::CamObjDistance: {
            const auto& o = obj(p.refs.at(0));
            const bool post_action = p.meta.value("post_action", false);
            if (post_action) return {true, "episode pair, checked by verify()"};
            return check_num(distance(pose.position, o.box.center), p);
        }
        case TaskKind::Area: {
            // recompute visit ratios cell-by-cell from camera positions
            double total = 0.0;
            bool any = false;
            const auto& rooms_of = ctx.cell_room();
            for (std::size_t r = 0; r < scene.rooms().size(); ++r) {
                std::size_t free_cells = 0, visited = 0;
                for (std::size_t i = 0; i < ctx.grid.cell_count(); ++i) {
                    if (rooms_of[i] != static_cast<int>(r)) continue;
                    ++free_cells;
                    const Point2 c = ctx.grid.cell_center(i);
                    for (std::size_t f = 0; f < frame; ++f) {
                        const Point2 q = traj.poses[f].position.xy();
                        const double dx = c.x - q.x, dy = c.y - q.y;
                        if (dx * dx + dy * dy <= ctx.config.d_visit * ctx.config.d_visit) {
                            ++visited;
                            break;
                        }
                    }
                }
                if (free_cells == 0) continue;
                if (static_cast<double>(visited) / free_cells >=
                    ctx.config.area_visit_threshold) {
                    total += polygon_area(scene.rooms()[r].polygon);
                    any = true;
                }
            }
            if (!any) return fail("oracle: no room passes the visit threshold");
            return check_num(total, p);
        }
        case TaskKind::Sequence: {
            std::vector<std::pair<std::size_t, std::string>> order;
            for (const auto& id : p.refs)
                order.push_back({*table.first_appearance(id), obj(id).category});
            std::sort(order.begin(), order.end());
            std::string expected;
            for (std::size_t i = 0; i < order.size(); ++i)
                expected += (i ? " -> " : "") + order[i].second;
            return check_mc(expected, p);
        }
        case TaskKind::SequenceIdentification: {
            std::optional<std::size_t> best;
            std::string cat;
            for (const auto& id : p.refs) {
                const auto fa = table.first_appearance(id);
                if (!best || *fa < *best) {
                    best = *fa;
                    cat = obj(id).category;
                }
            }
            return check_mc(cat, p);
        }
        case TaskKind::SpatialProximity: {
            const auto& anchor = obj(p.meta.at("anchor_id").get<std::string>());
            std::optional<double> best;
            std::string best_id, best_cat;
            for (const auto& o : scene.objects()) {
                if (o.id == anchor.id || o.category == anchor.category) continue;
                const auto fa = table.first_appearance(o.id);
                if (!fa || *fa >= frame) continue;
                const double d = distance(o.box.center, anchor.box.center);
                if (!best || d < *best - 1e-12 ||
                    (std::abs(d - *best) <= 1e-12 && o.id < best_id)) {
                    best = d;
                    best_id = o.id;
                    best_cat = o.category;
                }
            }
            if (!best) return fail("oracle: no proximity candidate");
            return check_mc(best_cat, p);
        }
        case TaskKind::RelativeOrientation: {
            const auto& a = obj(p.meta.at("a_id").get<std::string>());
            const auto& b = obj(p.meta.at("b_id").get<std::string>());
            const auto& c = obj(p.meta.at("c_id").get<std::string>());
            const Point2 f = (b.box.center - a.box.center).xy();
            const Point2 v = (c.box.center - a.box.center).xy();
            const double angle =
                std::acos(std::clamp(dot(normalized(f), normalized(v)), -1.0, 1.0));
            const double cz = f.x * v.y - f.y * v.x;
            std::string expected;
            if (angle > ctx.config.back_angle_deg * kPi / 180.0) expected = "Back";
            else if (cz > 0) expected = "Left";
            else expected = "Right";
            return check_mc(expected, p);
        }
        case TaskKind::IdentificationClosest: {
            std::optional<double> best;
            std::string cat;
            for (const auto& jid : p.meta.at("candidate_ids")) {
                const auto& o = obj(jid.get<std::string>());
                const double d = distance(pose.position, o.box.center);
                if (!best || d < *best) {
                    best = d;
                    cat = o.category;
                }
            }
            return check_mc(cat, p);
        }
        case TaskKind::CameraMotionTarget: {
            const double w = p.meta.at("window_s").get<double>();
            const auto wf = static_cast<std::size_t>(std::floor(w * traj.fps + 0.5));
            const Pose& prev = traj.poses[frame - wf];
            std::optional<double> best;
            std::string cat;
            for (const auto& jid : p.meta.at("candidate_ids")) {
                const auto& o = obj(jid.get<std::string>());
                const double delta = distance(pose.position, o.box.center) -
                                     distance(prev.position, o.box.center);
                if (!best || delta < *best) {
                    best = delta;
                    cat = o.category;
                }
            }
            return check_mc(cat, p);
        }
        case TaskKind::TemHorizontalDirection: {
            const auto& target = obj(p.meta.at("target_id").get<std::string>());
            const Point2 d = target.box.center.xy() - pose.position.xy();
            const double bearing = angle_delta(pose.yaw, std::atan2(d.y, d.x));
            return check_mc(horizontal_direction_class(bearing), p);
        }
        case TaskKind::TemSpatialDistanceRef: {
            const auto& target = obj(p.meta.at("target_id").get<std::string>());
            const auto& ref = obj(p.meta.at("ref_id").get<std::string>());
            return check_num(distance(target.box.center, ref.box.center), p);
        }
        case TaskKind::TemCamObjDistanceRef: {
            const auto& target = obj(p.meta.at("target_id").get<std::string>());
            return check_num(distance(pose.position, target.box.center), p);
        }
    }
    return fail("oracle: unhandled task kind");
}

}  // namespace oracle

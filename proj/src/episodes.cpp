#include "s3forge/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "s3forge/errors.hpp"
#include "s3forge/visibility.hpp"

namespace s3forge {

using nlohmann::json;

std::vector<Action> episode_action_order(const EpisodeConfig& config) {
    std::vector<Action> order;
    for (ActionKind kind : {ActionKind::RotateLeft45, ActionKind::RotateRight45,
                            ActionKind::ScanForward90, ActionKind::Sweep360})
        order.push_back({kind, 0.0});
    for (ActionKind kind : {ActionKind::MoveForward, ActionKind::MoveLeft,
                            ActionKind::MoveRight})
        for (double d : config.move_distances) order.push_back({kind, d});
    return order;
}

namespace {

// fraction at the best post-action frame; nullopt when no frame reaches tau
std::optional<std::size_t> first_success_frame(const Scene& scene,
                                               const std::vector<Pose>& poses,
                                               std::size_t object_idx,
                                               const CameraIntrinsics& intrinsics,
                                               const VisParams& vis) {
    const auto& obj = scene.objects()[object_idx];
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const double f = visible_fraction(obj.box, poses[i], intrinsics, scene.opaque_set(),
                                          vis, scene.object_occluder_index(object_idx));
        if (f < vis.tau_vis) continue;
        const auto bbox = project(obj.box, poses[i], intrinsics);
        if (bbox && bbox->area() >= vis.min_px) return i;
    }
    return std::nullopt;
}

}  // namespace

std::vector<Episode> synthesize_episodes(const Scene& scene, const OccupancyGrid& grid,
                                         const Trajectory& traj,
                                         const VisibilityTable& table,
                                         const CameraIntrinsics& intrinsics,
                                         const VisParams& vis, const PlanConfig& plan_config,
                                         const EpisodeConfig& config) {
    std::vector<Episode> out;
    const auto actions = episode_action_order(config);
    const auto stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(config.probe_stride_s * traj.fps));

    for (std::size_t frame = 0; frame < traj.frame_count();
         frame += stride) {
        if (static_cast<int>(out.size()) >= config.max_episodes) break;
        const Pose& pose = traj.poses[frame];
        for (std::size_t o = 0; o < scene.objects().size(); ++o) {
            if (static_cast<int>(out.size()) >= config.max_episodes) break;
            const auto& obj = scene.objects()[o];
            const double dist = distance(pose.position, obj.box.center);
            if (dist > config.target_range_m) continue;
            if (table.at(frame, o).visible_fraction >= config.tau_occ) continue;

            // first action in enumeration order that brings the target above
            // tau_vis defines the ground truth
            for (const Action& action : actions) {
                ExecResult exec;
                try {
                    exec = execute(scene, grid, pose, action, plan_config);
                } catch (const Error&) {
                    break;  // start pose rejected; no episode at this frame
                }
                if (exec.poses.empty()) continue;
                const auto hit = first_success_frame(scene, exec.poses, o, intrinsics, vis);
                if (!hit) continue;

                Episode ep;
                ep.t_start = pose.time_s;
                ep.start = pose;
                ep.gt_action = action;
                ep.post_frames = exec.poses;
                ep.target_id = obj.id;
                ep.tau = vis.tau_vis;
                ep.tau_occ = config.tau_occ;

                // target-referencing question answered post-action
                const Pose& at = exec.poses[*hit];
                ep.qa.id = scene.id() + "_ep_" + std::to_string(out.size());
                ep.qa.scene_id = scene.id();
                ep.qa.trajectory_id = traj.id;
                ep.qa.timestamp_s = pose.time_s;
                ep.qa.task = TaskKind::CamObjDistance;
                ep.qa.format = AnswerFormat::Num;
                ep.qa.question =
                    "What is the distance between the camera and the " + obj.category + "?";
                ep.qa.answer_value = distance(at.position, obj.box.center);
                ep.qa.answer_unit = "m";
                ep.qa.refs = {obj.id};
                ep.qa.meta["post_action"] = true;
                ep.qa.meta["answer_frame_offset"] = *hit;
                out.push_back(std::move(ep));
                break;
            }
        }
    }
    return out;
}

bool verify(const Episode& episode, const Scene& scene, const OccupancyGrid& grid,
            const CameraIntrinsics& intrinsics, const VisParams& vis,
            const PlanConfig& plan_config) {
    const auto idx = scene.object_index(episode.target_id);
    if (!idx) return false;
    const auto& obj = scene.objects()[*idx];

    const double before =
        visible_fraction(obj.box, episode.start, intrinsics, scene.opaque_set(), vis,
                         scene.object_occluder_index(*idx));
    if (before >= episode.tau_occ) return false;

    ExecResult exec;
    try {
        exec = execute(scene, grid, episode.start, episode.gt_action, plan_config);
    } catch (const Error&) {
        return false;
    }
    return first_success_frame(scene, exec.poses, *idx, intrinsics, vis).has_value();
}

std::string episodes_to_jsonl(const std::vector<Episode>& episodes,
                              const std::string& provenance_json) {
    std::ostringstream out;
    json header = provenance_json.empty() ? json::object() : json::parse(provenance_json);
    header["kind"] = "episodes";
    header["count"] = episodes.size();
    out << header.dump() << "\n";
    for (const auto& ep : episodes) {
        json j;
        j["qa"] = qa_to_json(ep.qa);
        j["t_start"] = ep.t_start;
        j["pose"] = {{"x", ep.start.position.x}, {"y", ep.start.position.y},
                     {"z", ep.start.position.z}, {"yaw", ep.start.yaw},
                     {"t", ep.start.time_s}};
        j["gt_action"] = json::parse(serialize_action(ep.gt_action));
        j["target_id"] = ep.target_id;
        j["tau"] = ep.tau;
        j["tau_occ"] = ep.tau_occ;
        j["post_frame_count"] = ep.post_frames.size();
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<Episode> episodes_from_jsonl(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty episode stream");
    json header = json::parse(line);
    if (header.value("kind", "") != "episodes")
        throw SchemaError("episode header line missing kind=episodes");
    std::vector<Episode> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        Episode ep;
        ep.qa = qa_from_json(j.at("qa"));
        ep.t_start = j.at("t_start").get<double>();
        const auto& jp = j.at("pose");
        ep.start.position = {jp.at("x").get<double>(), jp.at("y").get<double>(),
                             jp.at("z").get<double>()};
        ep.start.yaw = jp.at("yaw").get<double>();
        ep.start.time_s = jp.at("t").get<double>();
        ep.gt_action = parse_action(j.at("gt_action").dump());
        ep.target_id = j.at("target_id").get<std::string>();
        ep.tau = j.at("tau").get<double>();
        ep.tau_occ = j.at("tau_occ").get<double>();
        out.push_back(std::move(ep));
    }
    return out;
}

}  // namespace s3forge

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "s3forge/exec_env.hpp"
#include "s3forge/qa.hpp"

namespace s3forge {

// Insufficient-observation training episode: the target is effectively out
// of view at t_start and the ground-truth corrective action brings it above
// the visibility threshold.
struct Episode {
    QAPair qa;
    double t_start = 0.0;
    Pose start;
    Action gt_action;
    std::vector<Pose> post_frames;
    std::string target_id;
    double tau = 0.2;      // required fraction after the action
    double tau_occ = 0.05; // insufficiency band before the action
};

struct EpisodeConfig {
    double tau_occ = 0.05;
    double target_range_m = 6.0;
    // d values tried for each MOVE_* kind, fixed enumeration order
    std::vector<double> move_distances = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    double probe_stride_s = 1.0;  // (t, target) search stride
    int max_episodes = 16;
};

// candidate actions in deterministic ground-truth order: rotations first,
// then move_forward/move_left/move_right over the distance set
std::vector<Action> episode_action_order(const EpisodeConfig& config);

std::vector<Episode> synthesize_episodes(const Scene& scene, const OccupancyGrid& grid,
                                         const Trajectory& traj,
                                         const VisibilityTable& table,
                                         const CameraIntrinsics& intrinsics,
                                         const VisParams& vis, const PlanConfig& plan_config,
                                         const EpisodeConfig& config);

// re-executes gt_action and re-checks both thresholds
bool verify(const Episode& episode, const Scene& scene, const OccupancyGrid& grid,
            const CameraIntrinsics& intrinsics, const VisParams& vis,
            const PlanConfig& plan_config);

std::string episodes_to_jsonl(const std::vector<Episode>& episodes,
                              const std::string& provenance_json = "");
std::vector<Episode> episodes_from_jsonl(const std::string& bytes);

}  // namespace s3forge

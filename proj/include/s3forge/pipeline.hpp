#pragma once

#include <string>

#include "s3forge/episodes.hpp"
#include "s3forge/metrics.hpp"
#include "s3forge/planner.hpp"
#include "s3forge/qa.hpp"
#include "s3forge/scene.hpp"
#include "s3forge/stream.hpp"
#include "s3forge/toy_scene.hpp"
#include "s3forge/visibility.hpp"

namespace s3forge {

// One config for the whole pipeline. The global seed fans out into
// per-stage sub-seeds (splitmix derivation) so stages reproduce
// independently.
struct RunConfig {
    std::uint64_t seed = 0;
    double cell_size = 0.05;
    int n_threads = 1;
    int toy_rooms = 3;
    int toy_objects = 12;
    int object_target_keypoints = 2;
    CameraIntrinsics intrinsics;
    PlanConfig plan;
    VisParams vis;
    GenConfig gen;
    EpisodeConfig episodes;
    StreamConfig stream;
    MetricConfig metrics;
};

const char* tool_version();
std::string config_digest(const RunConfig& config);
// header fields every output artifact embeds
std::string provenance_json(const RunConfig& config);

std::uint64_t stage_seed(const RunConfig& config, std::string_view stage);

struct PlannedScene {
    Scene scene;
    OccupancyGrid grid;
    std::vector<Keypoint> keypoints;  // selected subset
    Trajectory trajectory;
};

// rasterize + keypoints + coverage selection + routed/smoothed/timed plan;
// the planning grid inflates clearance by one cell so smoothed poses keep
// the configured clearance
PlannedScene plan_pipeline(Scene scene, const RunConfig& config);

OccupancyGrid make_planning_grid(const Scene& scene, const RunConfig& config);

// gen context bundle wiring RunConfig pieces together
struct QaBundle {
    GenConfig gen;
    Rng rng;
    GenContext ctx;

    QaBundle(const Scene& scene, const Trajectory& traj, const VisibilityTable& table,
             const OccupancyGrid& grid, const VisParams& vis, const RunConfig& config);
};

std::map<TaskKind, int> default_quotas(const GenConfig& config);

}  // namespace s3forge

#include "s3forge/pipeline.hpp"

#include <sstream>

#include <json.hpp>

#include "s3forge/rng.hpp"

namespace s3forge {

using nlohmann::json;

const char* tool_version() { return "0.1.0"; }

std::string config_digest(const RunConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["cell_size"] = c.cell_size;
    j["toy"] = {c.toy_rooms, c.toy_objects};
    j["intrinsics"] = {c.intrinsics.width_px, c.intrinsics.height_px,
                       c.intrinsics.horizontal_fov_deg};
    j["plan"] = {c.plan.fps,       c.plan.v_max,     c.plan.turn_rate,
                 c.plan.sweep_rate, c.plan.accel,     c.plan.keypoint_budget,
                 c.plan.clearance,  c.plan.camera_height, c.plan.r_vis};
    j["vis"] = {c.vis.n_surface_samples, c.vis.tau_vis, c.vis.min_px, c.vis.max_range};
    j["gen"] = {c.gen.area_visit_threshold, c.gen.back_angle_deg, c.gen.n_choices,
                c.gen.chain_advance_s,      c.gen.min_displacement_m, c.gen.d_visit,
                c.gen.timestamp_count,      c.gen.quota_per_task};
    j["stream"] = {c.stream.fold_interval_s, c.stream.dense_window_s, c.stream.dense_fps,
                   c.stream.max_explore_rounds, c.stream.blind};
    j["metrics"] = {c.metrics.thresholds, c.metrics.blind};
    std::ostringstream hex;
    hex << std::hex << fnv1a64(j.dump());
    return hex.str();
}

std::string provenance_json(const RunConfig& config) {
    json j;
    j["tool_version"] = tool_version();
    j["config_digest"] = config_digest(config);
    j["seed"] = config.seed;
    return j.dump();
}

std::uint64_t stage_seed(const RunConfig& config, std::string_view stage) {
    return derive_seed(config.seed, stage);
}

OccupancyGrid make_planning_grid(const Scene& scene, const RunConfig& config) {
    return rasterize(scene, config.cell_size, config.plan.clearance + config.cell_size);
}

PlannedScene plan_pipeline(Scene scene, const RunConfig& config) {
    OccupancyGrid grid = make_planning_grid(scene, config);

    PlanConfig plan_config = config.plan;
    plan_config.seed = stage_seed(config, "plan:" + scene.id());

    // a seeded sample of objects becomes standoff keypoints
    std::vector<std::string> target_ids;
    {
        Rng rng(derive_seed(plan_config.seed, "object_targets"));
        std::vector<std::string> ids;
        for (const auto& obj : scene.objects()) ids.push_back(obj.id);
        rng.shuffle(ids);
        const std::size_t n =
            std::min<std::size_t>(ids.size(),
                                  static_cast<std::size_t>(std::max(0, config.object_target_keypoints)));
        target_ids.assign(ids.begin(), ids.begin() + n);
    }

    std::vector<Keypoint> candidates = sample_keypoints(scene, grid, plan_config, target_ids);

    // plan() requires mutually reachable keypoints; keep only those inside
    // the grid's largest FREE component
    {
        std::vector<int> comp(grid.cell_count(), -1);
        std::vector<std::size_t> comp_size;
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            if (!grid.is_free(i) || comp[i] >= 0) continue;
            const int id = static_cast<int>(comp_size.size());
            std::vector<std::size_t> stack{i};
            comp[i] = id;
            std::size_t size = 0;
            while (!stack.empty()) {
                const std::size_t cur = stack.back();
                stack.pop_back();
                ++size;
                const int cx = grid.ix_of(cur), cy = grid.iy_of(cur);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!grid.is_free(cx + dx, cy + dy)) continue;
                        const std::size_t n = grid.index(cx + dx, cy + dy);
                        if (comp[n] < 0) {
                            comp[n] = id;
                            stack.push_back(n);
                        }
                    }
            }
            comp_size.push_back(size);
        }
        const int main_comp = static_cast<int>(
            std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
        std::vector<Keypoint> reachable;
        for (const auto& kp : candidates) {
            const auto cell = grid.cell_of(kp.position);
            if (cell && comp[*cell] == main_comp) reachable.push_back(kp);
        }
        candidates = std::move(reachable);
    }

    std::vector<Keypoint> selected =
        select_keypoints(candidates, grid, config.intrinsics, plan_config);
    Trajectory traj = plan(scene, grid, selected, plan_config);
    return PlannedScene{std::move(scene), std::move(grid), std::move(selected),
                        std::move(traj)};
}

QaBundle::QaBundle(const Scene& scene, const Trajectory& traj, const VisibilityTable& table,
                   const OccupancyGrid& grid, const VisParams& vis, const RunConfig& config)
    : gen(config.gen),
      rng((gen.seed = derive_seed(stage_seed(config, "genqa"), scene.id()), gen.seed)),
      ctx{scene, traj, table, grid, vis, gen, rng} {}

std::map<TaskKind, int> default_quotas(const GenConfig& config) {
    std::map<TaskKind, int> quotas;
    for (int k = 0; k < kTaskKindCount; ++k)
        quotas[static_cast<TaskKind>(k)] = config.quota_per_task;
    return quotas;
}

}  // namespace s3forge

// Shared end-to-end fixtures: seeded toy scene -> grid -> trajectory ->
// visibility table, at a coarser cell size to keep tests quick.
#pragma once

#include <memory>

#include "s3forge/pipeline.hpp"

namespace fixtures {

using namespace s3forge;

inline RunConfig test_config(std::uint64_t seed, int rooms = 2, int objects = 8) {
    RunConfig config;
    config.seed = seed;
    config.cell_size = 0.1;
    config.toy_rooms = rooms;
    config.toy_objects = objects;
    config.plan.keypoint_budget = 4;
    config.gen.timestamp_count = 10;
    return config;
}

struct Bundle {
    RunConfig config;
    PlannedScene planned;
    VisibilityTable table;
    std::unique_ptr<GenConfig> gen;
    std::unique_ptr<Rng> rng;
    std::unique_ptr<GenContext> ctx;

    Bundle(RunConfig cfg, PlannedScene p, VisibilityTable t)
        : config(cfg), planned(std::move(p)), table(std::move(t)) {
        gen = std::make_unique<GenConfig>(config.gen);
        gen->seed = derive_seed(stage_seed(config, "genqa"), planned.scene.id());
        rng = std::make_unique<Rng>(gen->seed);
        ctx = std::make_unique<GenContext>(GenContext{planned.scene, planned.trajectory, table,
                                                      planned.grid, config.vis, *gen, *rng});
    }
};

inline Bundle make_bundle(std::uint64_t seed, int rooms = 2, int objects = 8) {
    RunConfig config = test_config(seed, rooms, objects);
    Scene scene = gen_toy_scene(stage_seed(config, "scene"), rooms, objects);
    PlannedScene planned = plan_pipeline(std::move(scene), config);
    VisibilityTable table = compute_table(planned.scene, planned.trajectory,
                                          config.intrinsics, config.vis, config.n_threads);
    return Bundle(config, std::move(planned), std::move(table));
}

}  // namespace fixtures

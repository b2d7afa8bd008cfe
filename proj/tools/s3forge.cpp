// s3forge — streaming spatial QA benchmark pipeline.
//
// Subcommands: scene, plan, vis, genqa, episodes, run, eval, ablate-k.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 adapter/transport error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "s3forge/adapter.hpp"
#include "s3forge/errors.hpp"
#include "s3forge/log.hpp"
#include "s3forge/metrics.hpp"
#include "s3forge/pipeline.hpp"
#include "s3forge/rewriter.hpp"
#include "s3forge/scene_io.hpp"
#include "s3forge/session.hpp"

using namespace s3forge;
using nlohmann::json;

namespace {

struct CliState {
    RunConfig config;
    std::string scene_path;
    std::string traj_path;
    std::string table_path;
    std::string qa_path;
    std::string out_path;
    std::string out_dir = ".";
    std::string adapter_spec = "builtin:A";
    std::string rewriter_spec;
    std::string env_mode = "sim";
    std::string pred_path;
    std::string transcript_path;
    std::string k_list = "2,5,10,15";
    bool include_baselines = false;
    bool validate_only = false;
    std::string stub_answer = "A";
};

void add_common(CLI::App* cmd, CliState& st) {
    cmd->add_option("--seed", st.config.seed, "global seed");
    cmd->add_option("--cell-size", st.config.cell_size, "occupancy cell size, m");
    cmd->add_option("--threads", st.config.n_threads, "parallelism degree");
    cmd->add_option("--clearance", st.config.plan.clearance, "planning clearance, m");
    cmd->add_option("--budget", st.config.plan.keypoint_budget, "keypoint budget");
    cmd->add_option("--quota", st.config.gen.quota_per_task, "per-task QA quota");
    cmd->add_option("--timestamps", st.config.gen.timestamp_count, "sampled timestamps");
}

Scene load_scene_arg(const CliState& st) {
    if (st.scene_path.empty()) throw SchemaError("--scene is required");
    return load_scene_file(st.scene_path);
}

Trajectory load_traj_arg(const CliState& st) {
    if (st.traj_path.empty()) throw SchemaError("--traj is required");
    return load_trajectory_file(st.traj_path);
}

VisibilityTable load_table_arg(const CliState& st) {
    if (st.table_path.empty()) throw SchemaError("--table is required");
    return VisibilityTable::from_jsonl(read_file(st.table_path));
}

std::vector<QAPair> load_qa_arg(const CliState& st) {
    if (st.qa_path.empty()) throw SchemaError("--qa is required");
    return qa_set_from_jsonl(read_file(st.qa_path));
}

int cmd_scene(CliState& st) {
    if (st.validate_only) {
        Scene scene = load_scene_arg(st);
        std::cerr << "scene '" << scene.id() << "': " << scene.rooms().size() << " rooms, "
                  << scene.objects().size() << " objects, " << scene.occluders().size()
                  << " occluders\n";
        return 0;
    }
    const std::uint64_t seed = stage_seed(st.config, "scene");
    Scene scene = gen_toy_scene(seed, st.config.toy_rooms, st.config.toy_objects);
    const std::string out = st.out_path.empty() ? scene.id() + ".json" : st.out_path;
    save_scene_file(scene, out);
    std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_plan(CliState& st) {
    Scene scene = load_scene_arg(st);
    PlannedScene planned = plan_pipeline(std::move(scene), st.config);
    const std::string out =
        st.out_path.empty() ? planned.trajectory.id + ".jsonl" : st.out_path;
    save_trajectory_file(planned.trajectory, out, provenance_json(st.config));
    if (!st.grid_pgm_path.empty()) write_file(st.grid_pgm_path, planned.grid.to_pgm());

    // plan metadata: keypoints, seed, config digest
    json meta;
    meta["provenance"] = json::parse(provenance_json(st.config));
    meta["keypoints"] = json::array();
    for (const auto& kp : planned.keypoints)
        meta["keypoints"].push_back({{"x", kp.position.x},
                                     {"y", kp.position.y},
                                     {"kind", to_string(kp.kind)},
                                     {"sweep_deg", kp.sweep_deg},
                                     {"room_id", kp.room_id}});
    meta["coverage"] =
        coverage(planned.trajectory, planned.grid, st.config.intrinsics, st.config.plan.r_vis);
    write_file(out + ".meta.json", meta.dump(2) + "\n");
    std::cerr << "wrote " << out << " (" << planned.trajectory.frame_count() << " frames)\n";
    return 0;
}

int cmd_vis(CliState& st) {
    Scene scene = load_scene_arg(st);
    Trajectory traj = load_traj_arg(st);
    VisibilityTable table =
        compute_table(scene, traj, st.config.intrinsics, st.config.vis, st.config.n_threads);
    const std::string out = st.out_path.empty() ? traj.id + ".vis.jsonl" : st.out_path;
    write_file(out, table.to_jsonl(provenance_json(st.config)));
    std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_genqa(CliState& st) {
    Scene scene = load_scene_arg(st);
    Trajectory traj = load_traj_arg(st);
    VisibilityTable table = load_table_arg(st);
    OccupancyGrid grid = make_planning_grid(scene, st.config);

    QaBundle bundle(scene, traj, table, grid, st.config.vis, st.config);
    std::vector<QAPair> pairs = generate_all(bundle.ctx, default_quotas(bundle.gen));

    if (!st.rewriter_spec.empty()) {
        std::unique_ptr<RewriterClient> client;
        if (st.rewriter_spec.rfind("stdio:", 0) == 0)
            client = make_stdio_rewriter(st.rewriter_spec.substr(6));
        else if (st.rewriter_spec.rfind("http:", 0) == 0)
            client = make_http_rewriter(st.rewriter_spec.substr(5));
        else
            throw RangeError("rewriter must be stdio:<cmd> or http:<url>");
        pairs = rewrite(std::move(pairs), *client);
    }

    const std::string out = st.out_path.empty() ? traj.id + ".qa.jsonl" : st.out_path;
    write_file(out, qa_set_to_jsonl(pairs, bundle.gen, provenance_json(st.config)));
    std::cerr << "wrote " << out << " (" << pairs.size() << " pairs)\n";
    return 0;
}

int cmd_episodes(CliState& st) {
    Scene scene = load_scene_arg(st);
    Trajectory traj = load_traj_arg(st);
    VisibilityTable table = load_table_arg(st);
    OccupancyGrid grid = make_planning_grid(scene, st.config);

    std::vector<Episode> eps =
        synthesize_episodes(scene, grid, traj, table, st.config.intrinsics, st.config.vis,
                            st.config.plan, st.config.episodes);
    const std::string out = st.out_path.empty() ? traj.id + ".episodes.jsonl" : st.out_path;
    write_file(out, episodes_to_jsonl(eps, provenance_json(st.config)));
    std::cerr << "wrote " << out << " (" << eps.size() << " episodes)\n";
    return 0;
}

int cmd_run(CliState& st) {
    Scene scene = load_scene_arg(st);
    Trajectory traj = load_traj_arg(st);
    std::vector<QAPair> pairs = load_qa_arg(st);

    auto adapter = make_adapter(st.adapter_spec, st.config.stream.adapter_timeout_ms);
    StreamConfig stream = blind_filter(st.config.stream, st.config.stream.blind);

    SessionTranscript transcript;
    if (st.env_mode == "sim") {
        OccupancyGrid grid = make_planning_grid(scene, st.config);
        ExploreEnv env{scene, grid, traj, st.config.plan};
        transcript = run_session(frames_from_trajectory(traj), pairs, *adapter, &env, stream);
    } else if (st.env_mode == "none") {
        transcript = run_session(frames_from_trajectory(traj), pairs, *adapter, nullptr, stream);
    } else {
        throw RangeError("--env must be sim or none");
    }

    const std::string out = st.out_path.empty() ? traj.id + ".transcript.jsonl" : st.out_path;
    write_file(out, transcript.to_jsonl(provenance_json(st.config)));
    std::cerr << "wrote " << out << " (" << transcript.records.size() << " queries)\n";
    return 0;
}

std::vector<Prediction> predictions_from_transcript(const std::string& bytes,
                                                    const std::vector<QAPair>& qas) {
    std::map<std::string, const QAPair*> by_id;
    for (const auto& qa : qas) by_id[qa.id] = &qa;
    std::vector<Prediction> out;
    std::istringstream in(bytes);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.value("kind", "") == "transcript") continue;
        const std::string qa_id = j.at("qa_id").get<std::string>();
        auto it = by_id.find(qa_id);
        if (it == by_id.end())
            throw ReferenceError("transcript references unknown qa_id '" + qa_id + "'");
        out.push_back(parse_prediction(j.at("final_answer").get<std::string>(), *it->second));
    }
    return out;
}

int cmd_eval(CliState& st) {
    std::vector<QAPair> pairs = load_qa_arg(st);
    std::vector<Prediction> preds;
    if (!st.pred_path.empty())
        preds = predictions_from_jsonl(read_file(st.pred_path), pairs);
    else if (!st.transcript_path.empty())
        preds = predictions_from_transcript(read_file(st.transcript_path), pairs);
    else
        throw SchemaError("eval needs --pred or --transcript");

    Report report = aggregate(preds, pairs, st.config.metrics);
    if (st.include_baselines) {
        report.baselines["random"] =
            aggregate(baseline_random(pairs, stage_seed(st.config, "baseline_random")), pairs,
                      st.config.metrics)
                .main;
        report.baselines["frequent"] =
            aggregate(baseline_frequent(pairs), pairs, st.config.metrics).main;
    }
    const std::string out = st.out_path.empty() ? "report.json" : st.out_path;
    write_file(out, report.to_json());
    std::cerr << "wrote " << out << " (overall " << report.main.overall << ")\n";
    return 0;
}

int cmd_ablate_k(CliState& st) {
    Scene scene = load_scene_arg(st);
    Trajectory traj = load_traj_arg(st);
    std::vector<QAPair> pairs = load_qa_arg(st);

    std::vector<double> ks;
    std::stringstream ss(st.k_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) ks.push_back(std::stod(tok));
    if (ks.empty()) throw RangeError("--K list is empty");

    OccupancyGrid grid = make_planning_grid(scene, st.config);
    for (double k : ks) {
        RunConfig cfg = st.config;
        cfg.stream.fold_interval_s = k;
        auto adapter = make_adapter(st.adapter_spec, cfg.stream.adapter_timeout_ms);
        ExploreEnv env{scene, grid, traj, cfg.plan};
        SessionTranscript transcript =
            run_session(frames_from_trajectory(traj), pairs, *adapter, &env, cfg.stream);

        std::vector<Prediction> preds;
        for (const auto& rec : transcript.records) {
            for (const auto& qa : pairs)
                if (qa.id == rec.qa_id) {
                    preds.push_back(parse_prediction(rec.final_answer, qa));
                    break;
                }
        }
        Report report = aggregate(preds, pairs, cfg.metrics);

        json out;
        out["K"] = k;
        out["provenance"] = json::parse(provenance_json(cfg));
        const double duration = traj.duration_s();
        out["budget_at_end"] = {{"t", duration},
                                {"dense", expected_budget(cfg.stream, duration).dense_count},
                                {"sparse", expected_budget(cfg.stream, duration).sparse_count},
                                {"memories", expected_budget(cfg.stream, duration).memory_count}};
        out["report"] = json::parse(report.to_json());
        const std::string path =
            st.out_dir + "/ablate_k_" + std::to_string(static_cast<int>(k)) + ".json";
        write_file(path, out.dump(2) + "\n");
        std::cerr << "wrote " << path << "\n";
    }
    return 0;
}

// hidden stdio adapter stub speaking the wire protocol; used by tests and as
// a reference implementation of the contract
int cmd_adapter_stub(const CliState& st) {
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        json req = json::parse(line, nullptr, false);
        json res;
        if (!req.is_discarded() && req.value("op", "") == "summarize") {
            const auto n = req.value("frames", json::array()).size();
            res["text"] = "stub summary of " + std::to_string(n) + " frames";
        } else {
            res["text"] = st.stub_answer;
        }
        std::cout << res.dump() << "\n" << std::flush;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"s3forge: streaming spatial QA benchmark pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file");

    CliState st;

    auto* scene = app.add_subcommand("scene", "generate or validate a scene");
    add_common(scene, st);
    scene->add_option("--rooms", st.config.toy_rooms, "toy scene rooms (1-8)");
    scene->add_option("--objects", st.config.toy_objects, "toy scene objects (1-64)");
    scene->add_option("--scene", st.scene_path, "scene to validate");
    scene->add_flag("--validate", st.validate_only, "validate --scene and exit");
    scene->add_option("--out", st.out_path, "output path");

    auto* plan_cmd = app.add_subcommand("plan", "keypoints + trajectory");
    add_common(plan_cmd, st);
    plan_cmd->add_option("--scene", st.scene_path, "scene json")->required();
    plan_cmd->add_option("--out", st.out_path, "trajectory jsonl");

    auto* vis_cmd = app.add_subcommand("vis", "per-frame visibility table");
    add_common(vis_cmd, st);
    vis_cmd->add_option("--scene", st.scene_path)->required();
    vis_cmd->add_option("--traj", st.traj_path)->required();
    vis_cmd->add_option("--out", st.out_path, "table jsonl");

    auto* genqa = app.add_subcommand("genqa", "QA generation (+ optional rewrite)");
    add_common(genqa, st);
    genqa->add_option("--scene", st.scene_path)->required();
    genqa->add_option("--traj", st.traj_path)->required();
    genqa->add_option("--table", st.table_path)->required();
    genqa->add_option("--rewriter", st.rewriter_spec, "stdio:<cmd> or http:<url>");
    genqa->add_option("--out", st.out_path, "qa jsonl");

    auto* episodes = app.add_subcommand("episodes", "exploration episodes");
    add_common(episodes, st);
    episodes->add_option("--scene", st.scene_path)->required();
    episodes->add_option("--traj", st.traj_path)->required();
    episodes->add_option("--table", st.table_path)->required();
    episodes->add_option("--out", st.out_path, "episodes jsonl");

    auto* run = app.add_subcommand("run", "stream sessions against an adapter");
    add_common(run, st);
    run->add_option("--scene", st.scene_path)->required();
    run->add_option("--traj", st.traj_path)->required();
    run->add_option("--qa", st.qa_path)->required();
    run->add_option("--adapter", st.adapter_spec, "stdio:<cmd> | http:<url> | builtin:<ans>");
    run->add_option("--env", st.env_mode, "sim | none");
    run->add_flag("--blind", st.config.stream.blind, "strip visual inputs");
    run->add_option("--K", st.config.stream.fold_interval_s, "fold interval, s");
    run->add_option("--out", st.out_path, "transcript jsonl");

    auto* eval = app.add_subcommand("eval", "score predictions or transcripts");
    add_common(eval, st);
    eval->add_option("--qa", st.qa_path)->required();
    eval->add_option("--pred", st.pred_path, "predictions jsonl");
    eval->add_option("--transcript", st.transcript_path, "transcript jsonl");
    eval->add_flag("--baselines", st.include_baselines, "add random/frequent rows");
    eval->add_option("--out", st.out_path, "report json");

    auto* ablate = app.add_subcommand("ablate-k", "sweep fold interval K");
    add_common(ablate, st);
    ablate->add_option("--scene", st.scene_path)->required();
    ablate->add_option("--traj", st.traj_path)->required();
    ablate->add_option("--qa", st.qa_path)->required();
    ablate->add_option("--adapter", st.adapter_spec);
    ablate->add_option("--K", st.k_list, "comma-separated K values");
    ablate->add_option("--out-dir", st.out_dir, "report directory");

    auto* stub = app.add_subcommand("adapter-stub", "stdio adapter stub (testing)");
    stub->add_option("--answer", st.stub_answer, "fixed respond() text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (scene->parsed()) return cmd_scene(st);
        if (plan_cmd->parsed()) return cmd_plan(st);
        if (vis_cmd->parsed()) return cmd_vis(st);
        if (genqa->parsed()) return cmd_genqa(st);
        if (episodes->parsed()) return cmd_episodes(st);
        if (run->parsed()) return cmd_run(st);
        if (eval->parsed()) return cmd_eval(st);
        if (ablate->parsed()) return cmd_ablate_k(st);
        if (stub->parsed()) return cmd_adapter_stub(st);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.error_class() == ErrorClass::Transport ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

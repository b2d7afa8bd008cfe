#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s3forge/adapter.hpp"
#include "s3forge/exec_env.hpp"
#include "s3forge/qa.hpp"
#include "s3forge/stream.hpp"

namespace s3forge {

// Exploration environment handed to run_session when action responses are
// executable; without it, actions are recorded as (incorrect) answers.
struct ExploreEnv {
    const Scene& scene;
    const OccupancyGrid& grid;
    const Trajectory& trajectory;
    PlanConfig plan;
};

struct QueryRecord {
    std::string qa_id;
    double t = 0.0;
    std::string layout_digest;  // final round's layout
    std::string query_text;
    std::size_t layout_frame_items = 0;
    std::vector<std::string> explore_actions;  // serialized, in order
    std::size_t appended_frames = 0;
    std::string final_answer;
    bool adapter_error = false;
    bool env_error = false;
    BudgetSnapshot budget_at_query;
};

struct SessionTranscript {
    std::vector<QueryRecord> records;
    std::map<std::string, std::string> turn1_answers;  // chain_id -> adapter answer

    std::string to_jsonl(const std::string& provenance_json = "") const;
};

// stream frame refs for a trajectory ("frame:<index>" at frame times)
std::vector<FrameRef> frames_from_trajectory(const Trajectory& traj);

// turn-2 query conditioning: the adapter's own turn-1 answer, verbatim,
// never the ground truth
std::string conditioned_query(const QAPair& qa, const std::string& turn1_answer);

// renders the question plus lettered choices for MC pairs
std::string render_query(const QAPair& qa);

// Drives ingest/fold over the frame stream, answers the qa schedule in
// (t, turn) order, runs bounded exploration rounds when the adapter emits
// parseable actions and an environment is present.
SessionTranscript run_session(const std::vector<FrameRef>& frames,
                              const std::vector<QAPair>& schedule, ModelAdapter& adapter,
                              const ExploreEnv* env, const StreamConfig& config);

}  // namespace s3forge

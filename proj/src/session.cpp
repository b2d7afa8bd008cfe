#include "s3forge/session.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "s3forge/actions.hpp"
#include "s3forge/errors.hpp"
#include "s3forge/log.hpp"

namespace s3forge {

using nlohmann::json;

std::vector<FrameRef> frames_from_trajectory(const Trajectory& traj) {
    std::vector<FrameRef> out;
    out.reserve(traj.frame_count());
    for (std::size_t i = 0; i < traj.frame_count(); ++i)
        out.push_back({traj.poses[i].time_s, "frame:" + std::to_string(i)});
    return out;
}

std::string render_query(const QAPair& qa) {
    std::string text = "[t=" + std::to_string(qa.timestamp_s) + "s] " + qa.question;
    if (qa.format == AnswerFormat::Mc) {
        text += " Choices:";
        for (std::size_t i = 0; i < qa.choices.size(); ++i) {
            text += " ";
            text += static_cast<char>('A' + i);
            text += ") " + qa.choices[i];
        }
        text += " Answer with the letter.";
    } else {
        text += " Answer with a number" +
                (qa.answer_unit.empty() ? std::string(".")
                                        : " in " + qa.answer_unit + ".");
    }
    return text;
}

std::string conditioned_query(const QAPair& qa, const std::string& turn1_answer) {
    return "Your previous answer: \"" + turn1_answer + "\". " + render_query(qa);
}

namespace {

struct QueryRunner {
    ModelAdapter& adapter;
    const ExploreEnv* env;
    const StreamConfig& config;
    FoldState& state;
    std::map<std::string, std::string>& turn1_answers;

    QueryRecord run(const QAPair& qa) {
        QueryRecord rec;
        rec.qa_id = qa.id;
        rec.t = qa.timestamp_s;

        std::string query_text = render_query(qa);
        if (qa.turn_idx == 2) {
            auto it = turn1_answers.find(qa.chain_id);
            query_text = conditioned_query(qa, it == turn1_answers.end() ? "" : it->second);
        }
        rec.query_text = query_text;

        std::vector<LayoutItem> appended;  // exploration frames, per query only
        std::optional<Pose> cursor_pose;
        if (env) {
            const std::size_t frame = env->trajectory.frame_at(qa.timestamp_s);
            cursor_pose = env->trajectory.poses[frame];
        }

        int rounds = 0;
        for (;;) {
            SequenceLayout layout = assemble(state, query_text);
            if (!appended.empty() && !config.blind)
                layout.items.insert(layout.items.end() - 1, appended.begin(), appended.end());
            rec.layout_digest = layout.digest();
            rec.layout_frame_items = layout.frame_item_count();

            std::string response;
            try {
                response = adapter.respond(layout);
            } catch (const Error& e) {
                log::warn("adapter respond failed for ", qa.id, ": ", e.what());
                rec.adapter_error = true;
                rec.final_answer.clear();
                break;
            }

            const auto action = try_parse_action(response);
            if (action && env && rounds < config.max_explore_rounds) {
                ++rounds;
                ExecResult exec;
                try {
                    exec = execute(env->scene, env->grid, *cursor_pose, *action, env->plan);
                } catch (const Error& e) {
                    log::warn("action execution failed for ", qa.id, ": ", e.what());
                    rec.env_error = true;
                    rec.final_answer.clear();
                    break;
                }
                rec.explore_actions.push_back(serialize_action(*action));
                for (std::size_t i = 0; i < exec.poses.size(); ++i) {
                    appended.push_back({LayoutItemKind::DenseFrame, exec.poses[i].time_s,
                                        "explore:" + qa.id + ":" + std::to_string(rounds) +
                                            ":" + std::to_string(i)});
                }
                rec.appended_frames += exec.poses.size();
                if (!exec.poses.empty()) cursor_pose = exec.poses.back();
                continue;  // re-assemble, re-ask
            }

            // a non-action response, or an action with no environment /
            // exhausted rounds: recorded as the final answer
            rec.final_answer = response;
            break;
        }

        if (qa.turn_idx == 1) turn1_answers[qa.chain_id] = rec.final_answer;
        return rec;
    }
};

}  // namespace

SessionTranscript run_session(const std::vector<FrameRef>& frames,
                              const std::vector<QAPair>& schedule, ModelAdapter& adapter,
                              const ExploreEnv* env, const StreamConfig& config) {
    std::vector<QAPair> queue = schedule;
    std::stable_sort(queue.begin(), queue.end(), [](const QAPair& a, const QAPair& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        return a.turn_idx < b.turn_idx;
    });

    SessionTranscript transcript;
    FoldState state(config);
    QueryRunner runner{adapter, env, config, state, transcript.turn1_answers};

    std::size_t qi = 0;
    for (const auto& frame : frames) {
        state.ingest(frame);
        try {
            state.maybe_fold(adapter, frame.t);
        } catch (const Error&) {
            // fold pending; retried on the next tick
        }
        while (qi < queue.size() && queue[qi].timestamp_s <= frame.t + 1e-9) {
            QueryRecord rec = runner.run(queue[qi]);
            rec.budget_at_query = budget(state, frame.t);
            transcript.records.push_back(std::move(rec));
            ++qi;
        }
    }
    // anything scheduled past the stream end still gets asked on the final state
    while (qi < queue.size()) {
        QueryRecord rec = runner.run(queue[qi]);
        rec.budget_at_query = budget(state, state.now());
        transcript.records.push_back(std::move(rec));
        ++qi;
    }
    return transcript;
}

std::string SessionTranscript::to_jsonl(const std::string& provenance_json) const {
    std::ostringstream out;
    json header = provenance_json.empty() ? json::object() : json::parse(provenance_json);
    header["kind"] = "transcript";
    header["queries"] = records.size();
    out << header.dump() << "\n";
    for (const auto& r : records) {
        json j;
        j["qa_id"] = r.qa_id;
        j["t"] = r.t;
        j["layout_digest"] = r.layout_digest;
        j["query_text"] = r.query_text;
        j["layout_frame_items"] = r.layout_frame_items;
        j["explore_actions"] = r.explore_actions;
        j["appended_frames"] = r.appended_frames;
        j["final_answer"] = r.final_answer;
        j["adapter_error"] = r.adapter_error;
        j["env_error"] = r.env_error;
        j["budget"] = {{"dense", r.budget_at_query.dense_count},
                       {"sparse", r.budget_at_query.sparse_count},
                       {"memories", r.budget_at_query.memory_count}};
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace s3forge

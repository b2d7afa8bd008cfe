#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "s3forge/stream.hpp"

namespace s3forge {

// Boundary to the (external) answering model. Two request/response calls;
// the harness reads no other adapter state.
class ModelAdapter {
public:
    virtual ~ModelAdapter() = default;

    // produces the fold text: a description of the recent frames merged
    // with the previous summary
    virtual std::string summarize(const std::vector<FrameRef>& frames,
                                  const std::string& prev_summary) = 0;

    // answer text or action JSON for an assembled sequence layout
    virtual std::string respond(const SequenceLayout& layout) = 0;
};

// Deterministic, self-contained adapter. Summaries are digests of the frame
// refs; responses pop from a script (the last entry repeats forever).
class ScriptedAdapter : public ModelAdapter {
public:
    explicit ScriptedAdapter(std::vector<std::string> responses = {"A"})
        : responses_(std::move(responses)) {}

    std::string summarize(const std::vector<FrameRef>& frames,
                          const std::string& prev_summary) override;
    std::string respond(const SequenceLayout& layout) override;

    const std::vector<SequenceLayout>& seen_layouts() const { return seen_layouts_; }
    void fail_next_summarize(int times) { fail_summarize_ = times; }

private:
    std::vector<std::string> responses_;
    std::size_t cursor_ = 0;
    std::vector<SequenceLayout> seen_layouts_;
    int fail_summarize_ = 0;
};

// Out-of-process adapters speaking the wire protocol:
//   {"op":"summarize","frames":[refs],"prev":text} -> {"text":...}
//   {"op":"respond","layout":[{kind,t,ref|text}...]} -> {"text":...}
std::unique_ptr<ModelAdapter> make_stdio_adapter(const std::string& command,
                                                 int timeout_ms = 30000);
std::unique_ptr<ModelAdapter> make_http_adapter(const std::string& base_url,
                                                int timeout_ms = 30000);

// "stdio:<cmd>", "http:<url>", "builtin:<answer>" (fixed-answer script)
std::unique_ptr<ModelAdapter> make_adapter(const std::string& endpoint_spec,
                                           int timeout_ms = 30000);

}  // namespace s3forge

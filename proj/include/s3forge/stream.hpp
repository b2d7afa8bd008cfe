#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace s3forge {

struct StreamConfig {
    double fold_interval_s = 10.0;  // K
    double dense_window_s = 10.0;
    double dense_fps = 1.0;
    std::string sink_prefix =
        "You are a spatial understanding agent; based on the observed spatial "
        "information, answer the corresponding questions.";
    int max_explore_rounds = 3;
    int adapter_timeout_ms = 30000;
    bool blind = false;  // drop frames from layouts and disable folding
};

struct FrameRef {
    double t = 0.0;
    std::string ref;  // path or content hash; the harness never sends pixels
};

struct MemoryEntry {
    double t_fold = 0.0;
    std::string text;
};

class ModelAdapter;  // adapter.hpp

// Bounded-memory stream state: a 1-FPS dense ring over the recent window,
// one sparse frame plus one text memory per completed fold, and the
// recursively merged global summary.
class FoldState {
public:
    explicit FoldState(StreamConfig config) : config_(std::move(config)) {}

    const StreamConfig& config() const { return config_; }
    const std::deque<FrameRef>& dense() const { return dense_; }
    const std::vector<FrameRef>& sparse() const { return sparse_; }
    const std::vector<MemoryEntry>& memories() const { return memories_; }
    const std::string& global_summary() const { return global_summary_; }
    double now() const { return now_; }
    std::size_t completed_folds() const { return memories_.size(); }

    // Appends the frame when it crosses the next dense tick, evicts beyond
    // the window. Throws ClockError on time regression.
    void ingest(const FrameRef& frame);

    // Performs every fold whose K-boundary t has crossed; adapter failures
    // leave the fold pending for the next tick.
    void maybe_fold(ModelAdapter& adapter, double t);

private:
    StreamConfig config_;
    std::deque<FrameRef> dense_;
    std::vector<FrameRef> sparse_;
    std::vector<MemoryEntry> memories_;
    std::string global_summary_;
    double now_ = -1.0;
    std::size_t dense_ticks_ = 0;
};

enum class LayoutItemKind : std::uint8_t { SinkPrompt, SparseFrame, Memory, DenseFrame, Query };

struct LayoutItem {
    LayoutItemKind kind;
    double t = 0.0;
    std::string content;  // frame ref or text
};

// S_t = [sink, (sparse_1, mem_1), ..., (sparse_n, mem_n), dense..., query]
struct SequenceLayout {
    std::vector<LayoutItem> items;

    std::size_t frame_item_count() const;
    std::string query_text() const;
    std::string digest() const;  // FNV-1a over the serialized items
    std::string to_json() const;
};

SequenceLayout assemble(const FoldState& state, const std::string& query_text);

struct BudgetSnapshot {
    std::size_t dense_count = 0;
    std::size_t sparse_count = 0;
    std::size_t memory_count = 0;

    bool operator==(const BudgetSnapshot&) const = default;
};

BudgetSnapshot budget(const FoldState& state, double t);

// the arithmetic the state must realize: (min(floor(t*fps) in-window, cap),
// floor(t/K), floor(t/K))
BudgetSnapshot expected_budget(const StreamConfig& config, double t);

}  // namespace s3forge

#include "s3forge/stream.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "s3forge/adapter.hpp"
#include "s3forge/errors.hpp"
#include "s3forge/log.hpp"
#include "s3forge/rng.hpp"

namespace s3forge {

using nlohmann::json;

void FoldState::ingest(const FrameRef& frame) {
    if (frame.t < now_) {
        std::ostringstream os;
        os << "time regression: " << frame.t << " after " << now_;
        throw ClockError(os.str());
    }
    now_ = frame.t;

    // dense tick boundary: the (n+1)-th retained frame needs t >= (n+1)/fps
    const double next_tick = static_cast<double>(dense_ticks_ + 1) / config_.dense_fps;
    if (frame.t >= next_tick - 1e-9) {
        dense_.push_back(frame);
        dense_ticks_ = static_cast<std::size_t>(std::floor(frame.t * config_.dense_fps + 1e-9));
    }
    while (!dense_.empty() && dense_.front().t <= now_ - config_.dense_window_s + 1e-9)
        dense_.pop_front();
}

void FoldState::maybe_fold(ModelAdapter& adapter, double t) {
    if (config_.blind) return;  // blind mode disables folding entirely
    const double k = config_.fold_interval_s;
    while (static_cast<double>(completed_folds() + 1) * k <= t + 1e-9) {
        const double fold_t = static_cast<double>(completed_folds() + 1) * k;
        std::vector<FrameRef> recent(dense_.begin(), dense_.end());
        std::string merged;
        try {
            merged = adapter.summarize(recent, global_summary_);
        } catch (const Error& e) {
            // fold stays pending; retried at the next tick
            log::warn("fold at t=", fold_t, " failed: ", e.what());
            throw;
        }
        // the sparse frame is the dense frame nearest the fold boundary
        FrameRef nearest;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : dense_) {
            const double d = std::abs(f.t - fold_t);
            if (d < best) {
                best = d;
                nearest = f;
            }
        }
        if (dense_.empty()) nearest = FrameRef{fold_t, "frame:none"};
        sparse_.push_back(nearest);
        memories_.push_back({fold_t, merged});
        global_summary_ = merged;
    }
}

std::size_t SequenceLayout::frame_item_count() const {
    std::size_t n = 0;
    for (const auto& item : items)
        n += (item.kind == LayoutItemKind::SparseFrame ||
              item.kind == LayoutItemKind::DenseFrame);
    return n;
}

std::string SequenceLayout::query_text() const {
    for (const auto& item : items)
        if (item.kind == LayoutItemKind::Query) return item.content;
    return "";
}

namespace {

const char* layout_kind_name(LayoutItemKind kind) {
    switch (kind) {
        case LayoutItemKind::SinkPrompt: return "sink";
        case LayoutItemKind::SparseFrame: return "sparse_frame";
        case LayoutItemKind::Memory: return "memory";
        case LayoutItemKind::DenseFrame: return "dense_frame";
        case LayoutItemKind::Query: return "query";
    }
    return "?";
}

}  // namespace

std::string SequenceLayout::to_json() const {
    json arr = json::array();
    for (const auto& item : items) {
        json j{{"kind", layout_kind_name(item.kind)}, {"t", item.t}};
        if (item.kind == LayoutItemKind::SparseFrame || item.kind == LayoutItemKind::DenseFrame)
            j["ref"] = item.content;
        else
            j["text"] = item.content;
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

std::string SequenceLayout::digest() const {
    std::uint64_t h = fnv1a64(to_json());
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

SequenceLayout assemble(const FoldState& state, const std::string& query_text) {
    SequenceLayout layout;
    layout.items.push_back({LayoutItemKind::SinkPrompt, 0.0, state.config().sink_prefix});
    const bool blind = state.config().blind;
    double last_fold = 0.0;
    for (std::size_t i = 0; i < state.memories().size(); ++i) {
        if (!blind)
            layout.items.push_back({LayoutItemKind::SparseFrame, state.sparse()[i].t,
                                    state.sparse()[i].ref});
        layout.items.push_back({LayoutItemKind::Memory, state.memories()[i].t_fold,
                                state.memories()[i].text});
        last_fold = state.memories()[i].t_fold;
    }
    if (!blind) {
        // dense frames at or before the last fold are already summarized;
        // keeping them would also break the non-decreasing timestamp order
        for (const auto& f : state.dense()) {
            if (f.t <= last_fold + 1e-9) continue;
            layout.items.push_back({LayoutItemKind::DenseFrame, f.t, f.ref});
        }
    }
    layout.items.push_back({LayoutItemKind::Query, state.now(), query_text});
    return layout;
}

BudgetSnapshot budget(const FoldState& state, double /*t*/) {
    return {state.dense().size(), state.sparse().size(), state.memories().size()};
}

BudgetSnapshot expected_budget(const StreamConfig& config, double t) {
    const auto in_window = static_cast<std::size_t>(std::floor(t * config.dense_fps + 1e-9));
    const auto cap =
        static_cast<std::size_t>(std::floor(config.dense_window_s * config.dense_fps + 1e-9));
    const auto folds =
        static_cast<std::size_t>(std::floor(t / config.fold_interval_s + 1e-9));
    return {std::min(in_window, cap), folds, folds};
}

}  // namespace s3forge

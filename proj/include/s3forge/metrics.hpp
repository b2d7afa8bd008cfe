#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s3forge/qa.hpp"
#include "s3forge/stream.hpp"

namespace s3forge {

struct Prediction {
    std::string qa_id;
    std::string raw_text;
    std::optional<int> choice_index;    // MC
    std::optional<double> numeric_value;  // NUM, converted to m / m^2
};

struct MetricConfig {
    // MRA confidence thresholds
    std::vector<double> thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                      0.75, 0.80, 0.85, 0.90, 0.95};
    bool blind = false;
};

// MC: a single letter A-D (case-insensitive, optional punctuation) or the
// exact normalized choice text. NUM: the first numeric literal, with an
// optional unit converted to meters / square meters. Parse failure scores 0.
Prediction parse_prediction(const std::string& text, const QAPair& qa);

// 1 iff the parsed index equals the answer index; FormatError on NUM pairs
int score_mc(const Prediction& pred, const QAPair& qa);

// mean over thresholds of 1[|y_hat - y| / |y| < 1 - theta]; y = 0 scores 1
// only for |y_hat| < 1e-9
double mra(double predicted, double ground_truth, const MetricConfig& config);

double score_prediction(const Prediction& pred, const QAPair& qa, const MetricConfig& config);

struct ReportRow {
    std::map<std::string, double> per_task;  // task name -> mean score
    double overall = 0.0;                    // unweighted mean over tasks present
};

struct Report {
    ReportRow main;
    std::map<std::string, ReportRow> baselines;
    std::map<std::string, int> counts;  // predictions per task
    std::string config_digest;
    std::string to_json() const;
};

// Throws ReferenceError when a prediction names an unknown qa_id. Empty task
// buckets are omitted from the report and the macro-average.
Report aggregate(const std::vector<Prediction>& preds, const std::vector<QAPair>& qas,
                 const MetricConfig& config);

// Random: uniform choice on MC, NUM left unanswered. Frequent: per-task
// modal answer over the provided qa set.
std::vector<Prediction> baseline_random(const std::vector<QAPair>& qas, std::uint64_t seed);
std::vector<Prediction> baseline_frequent(const std::vector<QAPair>& qas);

// blind sessions keep only sink + query; folding is disabled
StreamConfig blind_filter(StreamConfig config, bool blind);

std::vector<Prediction> predictions_from_jsonl(const std::string& bytes,
                                               const std::vector<QAPair>& qas);
std::string predictions_to_jsonl(const std::vector<Prediction>& preds);

}  // namespace s3forge

#include "s3forge/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "s3forge/errors.hpp"
#include "s3forge/rng.hpp"

namespace s3forge {

using nlohmann::json;

namespace {

std::string normalize(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) && (out.empty() || out.back() == ' '))
            continue;
        out.push_back(std::isspace(static_cast<unsigned char>(c))
                          ? ' '
                          : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::optional<int> parse_choice_letter(const std::string& text, std::size_t n_choices) {
    // strip whitespace and common punctuation around a single letter
    std::string core;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '.' || c == ')' || c == '(' || c == ':' || c == '"' || c == '\'') continue;
        core.push_back(c);
    }
    if (core.size() != 1) return std::nullopt;
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(core[0])));
    if (u < 'A' || u >= static_cast<char>('A' + n_choices)) return std::nullopt;
    return u - 'A';
}

struct UnitFactor {
    const char* name;
    double to_m;    // length factor
    double to_m2;   // area factor
};

constexpr UnitFactor kUnits[] = {
    {"millimeters", 0.001, 0.0},  {"millimeter", 0.001, 0.0}, {"mm", 0.001, 0.0},
    {"centimeters", 0.01, 1e-4},  {"centimeter", 0.01, 1e-4}, {"cm^2", 0.0, 1e-4},
    {"cm2", 0.0, 1e-4},           {"cm", 0.01, 1e-4},         {"kilometers", 1000.0, 0.0},
    {"kilometer", 1000.0, 0.0},   {"km", 1000.0, 0.0},        {"meters", 1.0, 1.0},
    {"meter", 1.0, 1.0},          {"sq m", 0.0, 1.0},         {"square meters", 0.0, 1.0},
    {"square meter", 0.0, 1.0},   {"m^2", 0.0, 1.0},          {"m2", 0.0, 1.0},
    {"m\xc2\xb2", 0.0, 1.0},      {"m", 1.0, 1.0},
};

std::optional<double> parse_numeric(const std::string& text, const std::string& target_unit) {
    // first numeric literal
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1]))))
            break;
        ++i;
    }
    if (i == text.size()) return std::nullopt;
    std::size_t end = i;
    try {
        const double value = std::stod(text.substr(i), &end);
        end += i;

        // optional unit token directly after the number
        std::size_t u = end;
        while (u < text.size() && std::isspace(static_cast<unsigned char>(text[u]))) ++u;
        std::string tail = normalize(text.substr(u, 16));
        for (const auto& unit : kUnits) {
            const std::string name = unit.name;
            if (tail.rfind(name, 0) != 0) continue;
            // unit must end at a word boundary
            if (tail.size() > name.size() &&
                std::isalnum(static_cast<unsigned char>(tail[name.size()])) &&
                tail[name.size()] != '2')
                continue;
            const double factor = target_unit == "m^2" ? unit.to_m2 : unit.to_m;
            if (factor == 0.0) return std::nullopt;  // wrong dimension for the task
            return value * factor;
        }
        return value;  // unitless: already in the task's unit
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

Prediction parse_prediction(const std::string& text, const QAPair& qa) {
    Prediction pred;
    pred.qa_id = qa.id;
    pred.raw_text = text;
    if (qa.format == AnswerFormat::Mc) {
        pred.choice_index = parse_choice_letter(text, qa.choices.size());
        if (!pred.choice_index) {
            const std::string norm = normalize(text);
            for (std::size_t i = 0; i < qa.choices.size(); ++i)
                if (norm == normalize(qa.choices[i])) {
                    pred.choice_index = static_cast<int>(i);
                    break;
                }
        }
    } else {
        pred.numeric_value = parse_numeric(text, qa.answer_unit);
    }
    return pred;
}

int score_mc(const Prediction& pred, const QAPair& qa) {
    if (qa.format != AnswerFormat::Mc)
        throw FormatError("score_mc on a numeric pair '" + qa.id + "'");
    return pred.choice_index && *pred.choice_index == qa.answer_index ? 1 : 0;
}

double mra(double predicted, double ground_truth, const MetricConfig& config) {
    if (config.thresholds.empty()) return 0.0;
    if (std::abs(ground_truth) < 1e-12)
        return std::abs(predicted) < 1e-9 ? 1.0 : 0.0;
    const double rel_err = std::abs(predicted - ground_truth) / std::abs(ground_truth);
    int pass = 0;
    // strict inequality with a tolerance so 0.3 vs (1 - 0.7) compares equal
    for (double theta : config.thresholds)
        if (rel_err < 1.0 - theta - 1e-12) ++pass;
    return static_cast<double>(pass) / static_cast<double>(config.thresholds.size());
}

double score_prediction(const Prediction& pred, const QAPair& qa, const MetricConfig& config) {
    if (qa.format == AnswerFormat::Mc) return static_cast<double>(score_mc(pred, qa));
    if (!pred.numeric_value) return 0.0;
    return mra(*pred.numeric_value, qa.answer_value, config);
}

Report aggregate(const std::vector<Prediction>& preds, const std::vector<QAPair>& qas,
                 const MetricConfig& config) {
    std::map<std::string, const QAPair*> by_id;
    for (const auto& qa : qas) by_id[qa.id] = &qa;

    std::map<std::string, std::pair<double, int>> buckets;  // task -> (sum, n)
    for (const auto& pred : preds) {
        auto it = by_id.find(pred.qa_id);
        if (it == by_id.end())
            throw ReferenceError("prediction references unknown qa_id '" + pred.qa_id + "'");
        const QAPair& qa = *it->second;
        auto& [sum, n] = buckets[to_string(qa.task)];
        sum += score_prediction(pred, qa, config);
        ++n;
    }

    Report report;
    double total = 0.0;
    for (const auto& [task, bucket] : buckets) {
        const double mean = bucket.second ? bucket.first / bucket.second : 0.0;
        report.main.per_task[task] = mean;
        report.counts[task] = bucket.second;
        total += mean;
    }
    report.main.overall = buckets.empty() ? 0.0 : total / static_cast<double>(buckets.size());

    json digest_src;
    digest_src["thresholds"] = config.thresholds;
    digest_src["blind"] = config.blind;
    std::ostringstream hex;
    hex << std::hex << fnv1a64(digest_src.dump());
    report.config_digest = hex.str();
    return report;
}

std::vector<Prediction> baseline_random(const std::vector<QAPair>& qas, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "baseline_random"));
    std::vector<Prediction> out;
    out.reserve(qas.size());
    for (const auto& qa : qas) {
        Prediction pred;
        pred.qa_id = qa.id;
        if (qa.format == AnswerFormat::Mc && !qa.choices.empty()) {
            const int idx = static_cast<int>(rng.index(qa.choices.size()));
            pred.raw_text = std::string(1, static_cast<char>('A' + idx));
            pred.choice_index = idx;
        }
        // numeric tasks stay unanswered, matching chance-level scoring
        out.push_back(std::move(pred));
    }
    return out;
}

std::vector<Prediction> baseline_frequent(const std::vector<QAPair>& qas) {
    // per-task modal answer: MC by index, NUM by answer rounded to 0.1
    std::map<std::string, std::map<long long, int>> mc_modes;
    std::map<std::string, std::map<long long, int>> num_modes;
    for (const auto& qa : qas) {
        if (qa.format == AnswerFormat::Mc)
            ++mc_modes[to_string(qa.task)][qa.answer_index];
        else
            ++num_modes[to_string(qa.task)][std::llround(qa.answer_value * 10.0)];
    }
    auto modal = [](const std::map<long long, int>& counts) {
        long long best_key = 0;
        int best = -1;
        for (const auto& [key, n] : counts)
            if (n > best) {
                best = n;
                best_key = key;
            }
        return best_key;
    };

    std::vector<Prediction> out;
    out.reserve(qas.size());
    for (const auto& qa : qas) {
        Prediction pred;
        pred.qa_id = qa.id;
        if (qa.format == AnswerFormat::Mc) {
            const int idx = static_cast<int>(modal(mc_modes[to_string(qa.task)]));
            pred.raw_text = std::string(1, static_cast<char>('A' + idx));
            if (idx < static_cast<int>(qa.choices.size())) pred.choice_index = idx;
        } else {
            const double value = static_cast<double>(modal(num_modes[to_string(qa.task)])) / 10.0;
            pred.raw_text = std::to_string(value);
            pred.numeric_value = value;
        }
        out.push_back(std::move(pred));
    }
    return out;
}

StreamConfig blind_filter(StreamConfig config, bool blind) {
    config.blind = blind;
    return config;
}

std::string Report::to_json() const {
    json j;
    auto row = [](const ReportRow& r) {
        json out;
        out["overall"] = r.overall;
        out["per_task"] = r.per_task;
        return out;
    };
    j["main"] = row(main);
    for (const auto& [name, b] : baselines) j["baselines"][name] = row(b);
    j["counts"] = counts;
    j["config_digest"] = config_digest;
    return j.dump(2) + "\n";
}

std::vector<Prediction> predictions_from_jsonl(const std::string& bytes,
                                               const std::vector<QAPair>& qas) {
    std::map<std::string, const QAPair*> by_id;
    for (const auto& qa : qas) by_id[qa.id] = &qa;

    std::vector<Prediction> out;
    std::istringstream in(bytes);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.contains("kind")) continue;  // header line
        const std::string qa_id = j.at("qa_id").get<std::string>();
        auto it = by_id.find(qa_id);
        if (it == by_id.end())
            throw ReferenceError("prediction references unknown qa_id '" + qa_id + "'");
        out.push_back(parse_prediction(j.at("text").get<std::string>(), *it->second));
    }
    return out;
}

std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
    std::ostringstream out;
    for (const auto& p : preds)
        out << json{{"qa_id", p.qa_id}, {"text", p.raw_text}}.dump() << "\n";
    return out.str();
}

}  // namespace s3forge

#include "s3forge/rewriter.hpp"

#include <json.hpp>

// httplib pulls in a lot; keep it to this translation unit
#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

#include "s3forge/errors.hpp"
#include "s3forge/log.hpp"
#include "s3forge/subprocess.hpp"

namespace s3forge {

using nlohmann::json;

namespace {

json rewrite_request(const std::string& question, const std::vector<std::string>& entities,
                     const std::string& answer_type) {
    return json{{"question", question}, {"entities", entities}, {"answer_type", answer_type}};
}

std::string parse_rewrite_response(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("question") || !j["question"].is_string())
        throw AdapterError("rewriter returned malformed response");
    return j["question"].get<std::string>();
}

class StdioRewriter : public RewriterClient {
public:
    explicit StdioRewriter(const std::string& command) : proc_(command) {}

    std::string rewrite(const std::string& question, const std::vector<std::string>& entities,
                        const std::string& answer_type) override {
        const std::string line = rewrite_request(question, entities, answer_type).dump();
        return parse_rewrite_response(proc_.round_trip(line, 10000));
    }

private:
    LineProcess proc_;
};

class HttpRewriter : public RewriterClient {
public:
    HttpRewriter(const std::string& base_url, int timeout_s)
        : client_(base_url), timeout_s_(timeout_s) {
        client_.set_connection_timeout(timeout_s_);
        client_.set_read_timeout(timeout_s_);
    }

    std::string rewrite(const std::string& question, const std::vector<std::string>& entities,
                        const std::string& answer_type) override {
        const std::string body = rewrite_request(question, entities, answer_type).dump();
        auto res = client_.Post("/rewrite", body, "application/json");
        if (!res || res->status != 200)
            throw AdapterError("rewriter HTTP POST /rewrite failed" +
                               (res ? " (status " + std::to_string(res->status) + ")" : ""));
        return parse_rewrite_response(res->body);
    }

private:
    httplib::Client client_;
    int timeout_s_;
};

}  // namespace

std::unique_ptr<RewriterClient> make_stdio_rewriter(const std::string& command) {
    return std::make_unique<StdioRewriter>(command);
}

std::unique_ptr<RewriterClient> make_http_rewriter(const std::string& base_url, int timeout_s) {
    return std::make_unique<HttpRewriter>(base_url, timeout_s);
}

std::vector<QAPair> rewrite(std::vector<QAPair> pairs, RewriterClient& client) {
    for (auto& pair : pairs) {
        std::vector<std::string> entities;
        for (const auto& ref : pair.refs) {
            // entity mentions are category names: "chair_2" -> "chair"
            const std::size_t us = ref.find_last_of('_');
            entities.push_back(us == std::string::npos ? ref : ref.substr(0, us));
        }
        const std::string answer_type = pair.format == AnswerFormat::Mc ? "MC" : "NUM";
        try {
            std::string candidate = client.rewrite(pair.question, entities, answer_type);
            bool keeps_entities = true;
            for (const auto& e : entities)
                if (candidate.find(e) == std::string::npos) {
                    keeps_entities = false;
                    break;
                }
            if (keeps_entities && !candidate.empty()) {
                pair.question = std::move(candidate);
            } else {
                log::warn("rewriter dropped an entity for '", pair.id, "', keeping original");
            }
        } catch (const Error& e) {
            log::warn("rewriter failed for '", pair.id, "': ", e.what(), " (keeping original)");
        }
    }
    return pairs;
}

}  // namespace s3forge

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "s3forge/qa.hpp"

namespace s3forge {

// LLM-backed question rewriting boundary. Wire contract:
//   request  {"question": str, "entities": [str], "answer_type": "NUM"|"MC"}
//   response {"question": str}
// transported in-process, as line-delimited JSON over a subprocess's
// standard streams, or as HTTP POST /rewrite.
class RewriterClient {
public:
    virtual ~RewriterClient() = default;
    // may throw AdapterError; the caller treats failures as non-fatal
    virtual std::string rewrite(const std::string& question,
                                const std::vector<std::string>& entities,
                                const std::string& answer_type) = 0;
};

// default: returns the question unchanged
class PassthroughRewriter : public RewriterClient {
public:
    std::string rewrite(const std::string& question, const std::vector<std::string>&,
                        const std::string&) override {
        return question;
    }
};

std::unique_ptr<RewriterClient> make_stdio_rewriter(const std::string& command);
std::unique_ptr<RewriterClient> make_http_rewriter(const std::string& base_url,
                                                   int timeout_s = 10);

// Replaces question text when the client succeeds and every entity mention
// survives (substring check); otherwise the original is kept. Answers are
// never altered.
std::vector<QAPair> rewrite(std::vector<QAPair> pairs, RewriterClient& client);

}  // namespace s3forge

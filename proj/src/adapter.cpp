#include "s3forge/adapter.hpp"

#include <sstream>

#include <json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

#include "s3forge/errors.hpp"
#include "s3forge/rng.hpp"
#include "s3forge/subprocess.hpp"

namespace s3forge {

using nlohmann::json;

std::string ScriptedAdapter::summarize(const std::vector<FrameRef>& frames,
                                       const std::string& prev_summary) {
    if (fail_summarize_ > 0) {
        --fail_summarize_;
        throw AdapterError("scripted summarize failure");
    }
    std::ostringstream os;
    os << "summary[" << frames.size() << " frames";
    if (!frames.empty()) os << ", t=" << frames.front().t << ".." << frames.back().t;
    os << ", prev=" << std::hex << fnv1a64(prev_summary) << "]";
    return os.str();
}

std::string ScriptedAdapter::respond(const SequenceLayout& layout) {
    seen_layouts_.push_back(layout);
    if (responses_.empty()) return "";
    const std::string& r = responses_[std::min(cursor_, responses_.size() - 1)];
    ++cursor_;
    return r;
}

namespace {

json summarize_request(const std::vector<FrameRef>& frames, const std::string& prev) {
    json refs = json::array();
    for (const auto& f : frames) refs.push_back(json{{"t", f.t}, {"ref", f.ref}});
    return json{{"op", "summarize"}, {"frames", refs}, {"prev", prev}};
}

json respond_request(const SequenceLayout& layout) {
    return json{{"op", "respond"}, {"layout", json::parse(layout.to_json())}};
}

std::string parse_text_response(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("text") || !j["text"].is_string())
        throw AdapterError("adapter returned malformed response: " + body.substr(0, 200));
    return j["text"].get<std::string>();
}

class StdioAdapter : public ModelAdapter {
public:
    StdioAdapter(const std::string& command, int timeout_ms)
        : proc_(command), timeout_ms_(timeout_ms) {}

    std::string summarize(const std::vector<FrameRef>& frames,
                          const std::string& prev) override {
        return parse_text_response(
            proc_.round_trip(summarize_request(frames, prev).dump(), timeout_ms_));
    }
    std::string respond(const SequenceLayout& layout) override {
        return parse_text_response(
            proc_.round_trip(respond_request(layout).dump(), timeout_ms_));
    }

private:
    LineProcess proc_;
    int timeout_ms_;
};

class HttpAdapter : public ModelAdapter {
public:
    HttpAdapter(const std::string& base_url, int timeout_ms) : client_(base_url) {
        client_.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client_.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    }

    std::string summarize(const std::vector<FrameRef>& frames,
                          const std::string& prev) override {
        return post(summarize_request(frames, prev).dump());
    }
    std::string respond(const SequenceLayout& layout) override {
        return post(respond_request(layout).dump());
    }

private:
    std::string post(const std::string& body) {
        auto res = client_.Post("/adapter", body, "application/json");
        if (!res || res->status != 200)
            throw AdapterError("adapter HTTP POST /adapter failed" +
                               (res ? " (status " + std::to_string(res->status) + ")" : ""));
        return parse_text_response(res->body);
    }

    httplib::Client client_;
};

}  // namespace

std::unique_ptr<ModelAdapter> make_stdio_adapter(const std::string& command, int timeout_ms) {
    return std::make_unique<StdioAdapter>(command, timeout_ms);
}

std::unique_ptr<ModelAdapter> make_http_adapter(const std::string& base_url, int timeout_ms) {
    return std::make_unique<HttpAdapter>(base_url, timeout_ms);
}

std::unique_ptr<ModelAdapter> make_adapter(const std::string& endpoint_spec, int timeout_ms) {
    if (endpoint_spec.rfind("stdio:", 0) == 0)
        return make_stdio_adapter(endpoint_spec.substr(6), timeout_ms);
    if (endpoint_spec.rfind("http:", 0) == 0) {
        std::string url = endpoint_spec.substr(5);
        if (url.rfind("//", 0) == 0) url = "http:" + url;  // allow http://host form
        return make_http_adapter(url, timeout_ms);
    }
    if (endpoint_spec.rfind("builtin:", 0) == 0)
        return std::make_unique<ScriptedAdapter>(
            std::vector<std::string>{endpoint_spec.substr(8)});
    throw RangeError("adapter endpoint must be stdio:<cmd>, http:<url> or builtin:<answer>");
}

}  // namespace s3forge

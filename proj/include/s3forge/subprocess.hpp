#pragma once

#include <string>

namespace s3forge {

// Line-oriented child process: one JSON request line out, one response line
// back. Used by the stdio rewriter and the stdio model adapter.
class LineProcess {
public:
    explicit LineProcess(const std::string& command);
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    // throws AdapterError on broken pipe or timeout
    std::string round_trip(const std::string& line, int timeout_ms);
    bool alive() const;

private:
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace s3forge

#include "s3forge/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace s3forge::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("S3FORGE_LOG");
    if (!v) return Level::Warn;
    if (std::strcmp(v, "error") == 0) return Level::Error;
    if (std::strcmp(v, "warn") == 0) return Level::Warn;
    if (std::strcmp(v, "info") == 0) return Level::Info;
    if (std::strcmp(v, "debug") == 0) return Level::Debug;
    return Level::Warn;
}

Level g_threshold = parse_env();

const char* name(Level lv) {
    switch (lv) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() { return g_threshold; }
void set_threshold(Level lv) { g_threshold = lv; }

void write(Level lv, const std::string& msg) {
    std::fprintf(stderr, "[s3forge %s] %s\n", name(lv), msg.c_str());
}

}  // namespace s3forge::log

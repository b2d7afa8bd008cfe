#pragma once

#include <sstream>
#include <string>

namespace s3forge::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from the S3FORGE_LOG environment variable
// (error|warn|info|debug); default is warn. All output goes to stderr.
Level threshold();
void set_threshold(Level lv);
void write(Level lv, const std::string& msg);

template <typename... Args>
void emit(Level lv, Args&&... args) {
    if (lv > threshold()) return;
    std::ostringstream os;
    (os << ... << args);
    write(lv, os.str());
}

template <typename... Args>
void error(Args&&... args) { emit(Level::Error, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { emit(Level::Warn, std::forward<Args>(args)...); }
template <typename... Args>
void info(Args&&... args) { emit(Level::Info, std::forward<Args>(args)...); }
template <typename... Args>
void debug(Args&&... args) { emit(Level::Debug, std::forward<Args>(args)...); }

}  // namespace s3forge::log

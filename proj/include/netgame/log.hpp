#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace netgame {

// Levels, quietest first. NETGAME_LOG selects the threshold ("error",
// "warn", "info", "debug"); unset or unrecognized means "warn".
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_threshold() {
  static LogLevel level = [] {
    const char* v = std::getenv("NETGAME_LOG");
    if (v == nullptr) return LogLevel::warn;
    if (std::strcmp(v, "error") == 0) return LogLevel::error;
    if (std::strcmp(v, "info") == 0) return LogLevel::info;
    if (std::strcmp(v, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

inline void log_line(LogLevel level, const std::string& msg) {
  if (level > log_threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)],
               msg.c_str());
}

inline void log_warn(const std::string& msg) { log_line(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_line(LogLevel::info, msg); }

}  // namespace netgame

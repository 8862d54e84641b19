#pragma once

#include <cstdio>
#include <string>

namespace chanalloc::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Active verbosity, initialized once from the CHANALLOC_LOG environment
/// variable ("error", "warn", "info", "debug"). Defaults to warn.
Level level();

void write(Level lvl, const std::string& message);

inline void error(const std::string& m) { write(Level::error, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

}  // namespace chanalloc::log

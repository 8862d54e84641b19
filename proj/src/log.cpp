#include "chanalloc/log.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace chanalloc::log {

namespace {

Level parse_level() {
    const char* env = std::getenv("CHANALLOC_LOG");
    if (env == nullptr) {
        return Level::warn;
    }
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::warn;
}

const char* level_tag(Level lvl) {
    switch (lvl) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

std::mutex g_mutex;

}  // namespace

Level level() {
    static const Level lvl = parse_level();
    return lvl;
}

void write(Level lvl, const std::string& message) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) {
        return;
    }
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "chanalloc [%s] %s\n", level_tag(lvl), message.c_str());
}

}  // namespace chanalloc::log

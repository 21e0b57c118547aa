#include "tpat/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tpat::log {

Level threshold() {
    static const Level cached = [] {
        const char* env = std::getenv("TPAT_LOG");
        if (!env) return Level::kWarn;
        if (std::strcmp(env, "debug") == 0) return Level::kDebug;
        if (std::strcmp(env, "info") == 0) return Level::kInfo;
        if (std::strcmp(env, "error") == 0) return Level::kError;
        return Level::kWarn;
    }();
    return cached;
}

void emit(Level level, const std::string& msg) {
    if (level < threshold()) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace tpat::log

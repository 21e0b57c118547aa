#ifndef TPAT_LOG_HPP_
#define TPAT_LOG_HPP_

#include <string>

// Minimal stderr logger. The only environment hook the library reads is
// TPAT_LOG=debug|info|warn|error (default warn).
namespace tpat::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

Level threshold();

void emit(Level level, const std::string& msg);

inline void debug(const std::string& msg) { emit(Level::kDebug, msg); }
inline void info(const std::string& msg) { emit(Level::kInfo, msg); }
inline void warn(const std::string& msg) { emit(Level::kWarn, msg); }
inline void error(const std::string& msg) { emit(Level::kError, msg); }

}  // namespace tpat::log

#endif  // TPAT_LOG_HPP_

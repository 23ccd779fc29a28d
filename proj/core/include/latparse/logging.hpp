#pragma once

#include <string>
#include <string_view>

namespace latparse {

inline constexpr const char* kLogLevelEnv = "LATPARSE_LOG_LEVEL";

enum class LogLevel { Debug, Info, Warn, Error, Off };

/// Reads LATPARSE_LOG_LEVEL (debug, info, warn, error, off; default warn).
/// Log lines go to stderr.
void init_logging();
void set_log_level(LogLevel level);
LogLevel parse_log_level(std::string_view name);  // throws UsageError

void log_debug(const std::string& message);
void log_info(const std::string& message);
void log_warn(const std::string& message);

}  // namespace latparse

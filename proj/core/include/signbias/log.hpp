#pragma once

#include <string_view>

namespace signbias {

enum class LogLevel { quiet, warning, info };

void set_log_level(LogLevel level) noexcept;
LogLevel log_level() noexcept;

// Human-oriented diagnostics on stderr. Never used for machine outputs.
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace signbias

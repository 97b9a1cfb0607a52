#pragma once

#include <string>

namespace bagclean {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from the BAGCLEAN_LOG environment variable
// (error|info|debug, default error). All diagnostics go to stderr.
LogLevel log_level();

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace bagclean

#include "bagclean/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace bagclean {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("BAGCLEAN_LOG");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

void log_error(const std::string& msg) {
  std::fprintf(stderr, "[error] %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) {
    std::fprintf(stderr, "[info] %s\n", msg.c_str());
  }
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) {
    std::fprintf(stderr, "[debug] %s\n", msg.c_str());
  }
}

}  // namespace bagclean

#include "core/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace snspd {
namespace {

std::mutex g_mutex;
LogHandler g_handler = nullptr;
void* g_user = nullptr;

}  // namespace

void set_log_handler(LogHandler handler, void* user_data) noexcept {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_handler = handler;
  g_user = user_data;
}

void log_warning(const std::string& message) noexcept {
  LogHandler handler;
  void* user;
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    handler = g_handler;
    user = g_user;
  }
  if (handler) {
    handler(message.c_str(), user);
  } else {
    std::fprintf(stderr, "snspd: warning: %s\n", message.c_str());
  }
}

}  // namespace snspd

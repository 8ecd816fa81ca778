#pragma once

#include <string>

namespace snspd {

// Warning sink for non-fatal events (round-off clamps and the like).
// Handler signature is C-compatible so the shared-library API can forward it.
using LogHandler = void (*)(const char* message, void* user_data);

void set_log_handler(LogHandler handler, void* user_data) noexcept;
void log_warning(const std::string& message) noexcept;

}  // namespace snspd

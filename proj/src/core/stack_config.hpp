#pragma once

#include <string>

#include "core/tmm.hpp"

namespace snspd {

// Stack description: either an explicit ordered layer list
//   {"entry_medium": ..., "exit_medium": ..., "layers": [...]}
// with one optional "airgap": true layer and at most one meander entry, or a
// named builder form {"builder": "membrane-cavity-v1", "params": {...}}.
// Material names resolve against the given library.
LayerStack stack_from_json_text(const MaterialLibrary& materials, const std::string& text,
                                const std::string& origin = "<string>");
LayerStack stack_from_json_file(const MaterialLibrary& materials, const std::string& path);

}  // namespace snspd

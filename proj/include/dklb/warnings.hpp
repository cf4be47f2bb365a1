#pragma once

// Process-wide record of non-fatal numerical warnings (capped multipliers,
// runs outside a theorem's hypotheses). The CLI copies them into the manifest.

#include <string>
#include <vector>

namespace dklb {

/// Records `message` once; repeated identical messages are dropped.
void record_warning(const std::string& message);
std::vector<std::string> recorded_warnings();
void clear_warnings();

}  // namespace dklb

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpdareach::cli {

// Exit codes: 0 analysis completed (verdict is in the report), 2 usage, parse
// or model error, 3 internal invariant violation.
inline constexpr int kOk = 0;
inline constexpr int kModelError = 2;
inline constexpr int kInternalError = 3;

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace tpdareach::cli

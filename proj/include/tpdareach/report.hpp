#pragma once

// Analysis report and its JSON form:
//   {"verdict": "reachable"|"unreachable", "target": str, "witness": [str]?,
//    "stats": {"regions": int, "rules": int, "ms": int},
//    "oracle": {"states": [str]}?}
// `simulate` reports carry no verdict or target.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tpdareach::report {

struct Stats {
    std::uint64_t regions = 0;
    std::uint64_t rules = 0;
    std::uint64_t ms = 0;
    friend bool operator==(const Stats &, const Stats &) = default;
};

struct Report {
    std::optional<bool> reachable;
    std::optional<std::string> target;
    std::optional<std::vector<std::string>> witness;
    Stats stats;
    std::optional<std::vector<std::string>> oracle_states;
    friend bool operator==(const Report &, const Report &) = default;
};

nlohmann::json to_json(const Report &r);

// Throws std::invalid_argument when `j` does not follow the schema.
Report from_json(const nlohmann::json &j);

// Plain text form used without --json.
std::string to_text(const Report &r);

} // namespace tpdareach::report

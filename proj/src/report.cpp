#include "tpdareach/report.hpp"

#include <stdexcept>

namespace tpdareach::report {

namespace {

std::vector<std::string> string_list(const nlohmann::json &j, const char *what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto &e : j) {
        if (!e.is_string())
            throw std::invalid_argument(std::string(what) + " must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::uint64_t count(const nlohmann::json &stats, const char *key) {
    if (!stats.contains(key) || !stats[key].is_number_unsigned())
        throw std::invalid_argument(std::string("stats.") + key + " must be a nonnegative integer");
    return stats[key].get<std::uint64_t>();
}

} // namespace

nlohmann::json to_json(const Report &r) {
    nlohmann::json j;
    if (r.reachable)
        j["verdict"] = *r.reachable ? "reachable" : "unreachable";
    if (r.target)
        j["target"] = *r.target;
    if (r.witness)
        j["witness"] = *r.witness;
    j["stats"] = {{"regions", r.stats.regions}, {"rules", r.stats.rules}, {"ms", r.stats.ms}};
    if (r.oracle_states)
        j["oracle"] = {{"states", *r.oracle_states}};
    return j;
}

Report from_json(const nlohmann::json &j) {
    if (!j.is_object())
        throw std::invalid_argument("report must be a JSON object");
    for (const auto &[key, value] : j.items())
        if (key != "verdict" && key != "target" && key != "witness" && key != "stats" && key != "oracle")
            throw std::invalid_argument("unknown report field '" + key + "'");

    Report r;
    if (j.contains("verdict")) {
        const auto &v = j["verdict"];
        if (!v.is_string() || (v != "reachable" && v != "unreachable"))
            throw std::invalid_argument("verdict must be \"reachable\" or \"unreachable\"");
        r.reachable = v == "reachable";
        if (!j.contains("target") || !j["target"].is_string())
            throw std::invalid_argument("a verdict needs a string target");
    }
    if (j.contains("target")) {
        if (!j["target"].is_string())
            throw std::invalid_argument("target must be a string");
        r.target = j["target"].get<std::string>();
    }
    if (j.contains("witness"))
        r.witness = string_list(j["witness"], "witness");
    if (!j.contains("stats") || !j["stats"].is_object())
        throw std::invalid_argument("stats object is required");
    r.stats = Stats{count(j["stats"], "regions"), count(j["stats"], "rules"), count(j["stats"], "ms")};
    if (j.contains("oracle")) {
        const auto &o = j["oracle"];
        if (!o.is_object() || !o.contains("states"))
            throw std::invalid_argument("oracle must be an object with a states array");
        r.oracle_states = string_list(o["states"], "oracle.states");
    }
    return r;
}

std::string to_text(const Report &r) {
    std::string out;
    if (r.reachable)
        out += "verdict: " + std::string(*r.reachable ? "reachable" : "unreachable") + "\n";
    if (r.target)
        out += "target: " + *r.target + "\n";
    if (r.witness) {
        out += "witness:\n";
        for (const auto &line : *r.witness)
            out += "  " + line + "\n";
    }
    if (r.oracle_states) {
        out += "states:";
        for (const auto &s : *r.oracle_states)
            out += " " + s;
        out += "\n";
    }
    out += "regions: " + std::to_string(r.stats.regions) + ", rules: " + std::to_string(r.stats.rules) +
           ", time: " + std::to_string(r.stats.ms) + " ms\n";
    return out;
}

} // namespace tpdareach::report

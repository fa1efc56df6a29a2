#pragma once

// Timed pushdown automata: the named model as written by users, an indexed
// form for analysis, and the concrete semantics over exact rationals.

#include "tpdareach/interval.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace tpdareach::tpda {

struct TpdaOp {
    enum class Kind : std::uint8_t { Nop, Test, Reset, Push, Pop };

    Kind kind = Kind::Nop;
    std::string name; // clock for Test/Reset, stack symbol for Push/Pop
    Interval interval = Interval::any();

    static TpdaOp nop() { return {}; }
    static TpdaOp test(std::string x, Interval iv) { return {Kind::Test, std::move(x), iv}; }
    static TpdaOp reset(std::string x, Interval iv) { return {Kind::Reset, std::move(x), iv}; }
    static TpdaOp push(std::string a, Interval iv) { return {Kind::Push, std::move(a), iv}; }
    static TpdaOp pop(std::string a, Interval iv) { return {Kind::Pop, std::move(a), iv}; }

    bool uses_clock() const { return kind == Kind::Test || kind == Kind::Reset; }
    bool uses_symbol() const { return kind == Kind::Push || kind == Kind::Pop; }

    friend bool operator==(const TpdaOp &, const TpdaOp &) = default;
};

struct TpdaRule {
    std::string src;
    TpdaOp op;
    std::string dst;
    friend bool operator==(const TpdaRule &, const TpdaRule &) = default;
};

struct Tpda {
    std::vector<std::string> states;
    std::string init;
    std::vector<std::string> clocks;
    std::vector<std::string> alphabet;
    std::vector<TpdaRule> rules;
    friend bool operator==(const Tpda &, const Tpda &) = default;
};

std::string to_string(const TpdaOp &op);
std::string to_string(const TpdaRule &r);

// Empty when the model is well formed.
std::vector<std::string> validate(const Tpda &t);

struct IndexedRule {
    std::uint32_t src = 0;
    TpdaOp::Kind kind = TpdaOp::Kind::Nop;
    std::uint16_t target = 0; // clock or symbol index
    Interval interval = Interval::any();
    std::uint32_t dst = 0;
};

// Validated model with names resolved to indices.
class IndexedTpda {
public:
    // Throws ModelError carrying every validation error.
    explicit IndexedTpda(Tpda model);

    const Tpda &model() const { return model_; }
    std::size_t num_states() const { return model_.states.size(); }
    std::size_t num_clocks() const { return model_.clocks.size(); }
    std::size_t num_symbols() const { return model_.alphabet.size(); }
    std::uint32_t init() const { return init_; }
    std::uint32_t cmax() const { return cmax_; }

    const std::vector<IndexedRule> &rules() const { return rules_; }
    const std::vector<std::size_t> &rules_from(std::uint32_t state) const { return by_src_[state]; }

    std::optional<std::uint32_t> state_index(const std::string &name) const;
    const std::string &state_name(std::uint32_t s) const { return model_.states[s]; }

private:
    Tpda model_;
    std::uint32_t init_ = 0;
    std::uint32_t cmax_ = 0;
    std::vector<IndexedRule> rules_;
    std::vector<std::vector<std::size_t>> by_src_;
    std::unordered_map<std::string, std::uint32_t> state_ids_;
};

struct StackEntry {
    std::uint16_t symbol = 0;
    Rational age;
    friend bool operator==(const StackEntry &, const StackEntry &) = default;
    friend std::weak_ordering operator<=>(const StackEntry &, const StackEntry &) = default;
};

// Concrete configuration; stack is topmost first.
struct TpdaConfig {
    std::uint32_t state = 0;
    std::vector<Rational> clocks;
    std::vector<StackEntry> stack;
    friend bool operator==(const TpdaConfig &, const TpdaConfig &) = default;
    friend std::weak_ordering operator<=>(const TpdaConfig &, const TpdaConfig &) = default;
};

// Initial state, all clocks 0, empty stack.
TpdaConfig initial_config(const IndexedTpda &t);

// Every clock and age advances by d > 0; DomainError otherwise.
TpdaConfig timed_step(const TpdaConfig &c, const Rational &d);

// Successors by one rule application. Reset and push choose among
// I ∩ {k/denominator <= c_max+1}.
std::set<TpdaConfig> discrete_step(const IndexedTpda &t, const TpdaConfig &c, std::uint32_t denominator);

struct GridOracleOptions {
    std::size_t max_steps = 0;
    std::uint32_t denominator = 1;
    // Stop early once all these states are visited. The full state set is
    // always a stopping point as the result cannot grow further.
    std::optional<std::set<std::uint32_t>> goal;
};

// Bounded exploration of the concrete semantics on a rational grid: each
// step is a delay from {0} ∪ {k/denominator : 1 <= k <= (c_max+1)*denominator}
// followed by one discrete transition. Returns the visited states. The
// frontier is expanded with OpenMP.
std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, const GridOracleOptions &opts);
std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, std::size_t max_steps, std::uint32_t denominator);

// Reference implementation over TpdaConfig, timed_step and discrete_step.
std::set<std::uint32_t> grid_oracle_serial(const IndexedTpda &t, const GridOracleOptions &opts);

struct GridOracleStats {
    std::size_t configurations = 0; // stored; the last step only records states
    std::size_t depth_reached = 0;
    bool stopped_early = false;
};

std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, const GridOracleOptions &opts, GridOracleStats &stats);

} // namespace tpdareach::tpda

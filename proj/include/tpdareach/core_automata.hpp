#pragma once

// Untimed pushdown automata: one-step semantics, saturation-based state
// reachability over an explicit or lazily generated rule set, a bounded BFS
// used as a test oracle, and witness replay.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace tpdareach::pda {

struct StateId {
    std::uint32_t value = 0;
    friend auto operator<=>(const StateId &, const StateId &) = default;
};

struct SymbolId {
    std::uint32_t value = 0;
    friend auto operator<=>(const SymbolId &, const SymbolId &) = default;
};

struct StackOp {
    enum class Kind : std::uint8_t { Push, Pop, Nop };

    Kind kind = Kind::Nop;
    SymbolId symbol{}; // meaningless for Nop, kept zero

    static StackOp push(SymbolId a) { return {Kind::Push, a}; }
    static StackOp pop(SymbolId a) { return {Kind::Pop, a}; }
    static StackOp nop() { return {Kind::Nop, SymbolId{}}; }

    friend auto operator<=>(const StackOp &, const StackOp &) = default;
};

struct PdaRule {
    StateId src;
    StackOp op;
    StateId dst;
    friend auto operator<=>(const PdaRule &, const PdaRule &) = default;
};

// Stack is stored topmost first.
struct PdaConfig {
    StateId state;
    std::vector<SymbolId> stack;
    friend auto operator<=>(const PdaConfig &, const PdaConfig &) = default;
};

struct Witness {
    std::vector<PdaRule> steps;
};

// Produces the rules leaving `state` when the topmost symbol is `top`
// (nullopt = empty stack). Push and Nop rules must not depend on `top`;
// Pop rules are only meaningful for the given top. Must be deterministic.
using RuleGenerator = std::function<std::vector<PdaRule>(StateId state, std::optional<SymbolId> top)>;
using StatePredicate = std::function<bool(StateId)>;

class Pda {
public:
    // Explicit finite automaton with states [0, num_states) and symbols
    // [0, num_symbols). Throws ModelError on undeclared references.
    static Pda from_rules(std::size_t num_states, StateId init, std::size_t num_symbols,
                          std::vector<PdaRule> rules);

    // Rules are streamed on demand; `declared` decides state membership.
    // `reads_top` marks the states that may have Pop rules; the others are
    // queried with an absent top. Without it every state counts as reading.
    static Pda from_generator(StateId init, RuleGenerator generator, StatePredicate declared,
                              StatePredicate reads_top = {});

    StateId init() const { return init_; }
    bool declares(StateId s) const;
    bool reads_top(StateId s) const;

    // Rules leaving `state` for the given top, validated against the state set.
    std::vector<PdaRule> rules_for(StateId state, std::optional<SymbolId> top) const;

    // Only for explicit automata.
    std::size_t num_states() const { return num_states_; }
    const std::vector<PdaRule> &explicit_rules() const { return rules_; }
    bool is_explicit() const { return !generator_; }

private:
    Pda() = default;

    StateId init_{};
    std::size_t num_states_ = 0;
    std::size_t num_symbols_ = 0;
    std::vector<PdaRule> rules_;
    std::vector<std::vector<std::size_t>> rules_by_src_;
    std::vector<bool> has_pop_;
    RuleGenerator generator_;
    StatePredicate declared_;
    StatePredicate reads_top_;
};

// All configurations reachable from `c` in one step. Throws ModelError on an
// undeclared state.
std::set<PdaConfig> pda_step(const Pda &pda, const PdaConfig &c);

// Configurations reachable in at most `max_steps` steps from (init, []).
std::set<PdaConfig> bounded_bfs(const Pda &pda, std::size_t max_steps);

struct ReplayFailure {
    std::size_t step = 0;
    std::string reason;
};

using ReplayResult = std::variant<PdaConfig, ReplayFailure>;

ReplayResult witness_replay(const Pda &pda, const Witness &w);

// Post*-style saturation. The automaton that recognises reachable stack
// contents has one node per push entry (target state, pushed symbol) plus a
// final node for the empty stack; transitions are discovered on demand, so a
// lazily generated alphabet is explored only as far as it is reachable.
// After a pop the remaining stack stays symbolic until a state that reads the
// top needs it, so pop-then-push costs one head instead of one per frame.
class Saturation {
public:
    explicit Saturation(const Pda &pda);
    ~Saturation();
    Saturation(Saturation &&) noexcept;
    Saturation &operator=(Saturation &&) noexcept;

    // Runs to fixpoint. Idempotent.
    void run();

    std::set<StateId> reachable_states() const;
    bool reached(StateId s) const;

    // Shortest-by-discovery witness for a reached state.
    std::optional<Witness> witness_for(StateId s) const;

    struct Counters {
        std::size_t heads = 0;   // (state, top, stack node) triples
        std::size_t entries = 0; // push entry nodes
        std::size_t rule_queries = 0;
    };
    Counters counters() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::set<StateId> reachable_states(const Pda &pda);

struct Reachable {
    Witness witness;
};
struct Unreachable {};
using Verdict = std::variant<Reachable, Unreachable>;

// Throws ModelError when `target` is not declared.
Verdict is_state_reachable(const Pda &pda, StateId target);

std::string to_string(const StackOp &op);

} // namespace tpdareach::pda

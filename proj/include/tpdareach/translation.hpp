#pragma once

// Symbolic pushdown automaton simulating a timed pushdown automaton. Its stack
// alphabet is the set of regions (bottom region relating the clocks, stack
// regions relating one stack symbol to the clocks and to the region below);
// rules are generated on demand while the saturation explores it.

#include "tpdareach/core_automata.hpp"
#include "tpdareach/regions.hpp"
#include "tpdareach/tpda.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tpdareach::translation {

using regions::Region;

// ---------------------------------------------------------------------------
// Region-level steps

// Bottom region: reference item and every clock at 0 in set 0.
Region initial_region(const tpda::IndexedTpda &t);

// Region pushed on top of `top` for push(symbol, iv): plain clocks and the
// reference are copied, each gets a shadow at its exact position, the old
// plain stack symbol becomes a shadow, and the new symbol is placed anywhere
// its age satisfies `iv`.
std::set<Region> push_successors(const Region &top, std::uint16_t symbol, const Interval &iv);

// Rotations (reference item included) of `lower` whose plain items line up
// with the shadows of `upper`, with their rotation counts, over one cycle.
std::vector<std::pair<std::size_t, Region>> refresh(const Region &lower, const Region &upper);

// Combines a refreshed lower region with the region being popped: stack
// symbol and shadows from below, clocks and reference from above. Items that
// fall between the same two skeleton points are interleaved in every
// consistent way. Throws DomainError when the skeletons do not match.
std::set<Region> merge(const Region &lower_rot, const Region &upper);

// Every region that can replace `lower` once `upper` is popped.
std::set<Region> pop_successors(const Region &lower, const Region &upper);

// ---------------------------------------------------------------------------
// Symbolic automaton

struct SymbolicState {
    enum class Kind : std::uint8_t {
        Start,       // empty stack; pushes the initial region
        Plain,       // simulates tpda state `state`
        PushThen,    // push `first`, continue in Plain(state)
        PushTwo,     // push `first`, then push `second`, continue in Plain(state)
        AwaitLower,  // `first` was popped; pop the region below and merge
    };
    Kind kind = Kind::Start;
    std::uint32_t state = 0;
    pda::SymbolId first{};
    pda::SymbolId second{};

    friend auto operator<=>(const SymbolicState &, const SymbolicState &) = default;
};

struct TranslationStats {
    std::size_t regions = 0;
    std::size_t mid_states = 0;
    std::size_t rules = 0;
};

class SymbolicPda {
public:
    explicit SymbolicPda(const tpda::Tpda &t);

    const tpda::IndexedTpda &tpda() const;

    // Generator-backed automaton sharing this object's tables.
    const pda::Pda &pda() const;

    pda::StateId start() const;
    pda::StateId plain_state(std::uint32_t tpda_state) const;
    const SymbolicState &state(pda::StateId s) const;
    const Region &region(pda::SymbolId a) const;
    pda::SymbolId symbol_of(const Region &r) const;

    // Rule families leaving Plain(s) for the given top region.
    std::vector<pda::PdaRule> timed_rules(std::uint32_t s, pda::SymbolId top) const;
    std::vector<pda::PdaRule> rule_family(std::size_t tpda_rule, pda::SymbolId top) const;

    std::vector<pda::PdaRule> rules_for(pda::StateId s, std::optional<pda::SymbolId> top) const;

    TranslationStats stats() const;

    std::string state_name(pda::StateId s) const;
    std::string render_region(pda::SymbolId a) const;
    std::string render_rule(const pda::PdaRule &r) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Runs the saturation once and answers queries about any target.
class Analysis {
public:
    explicit Analysis(const tpda::Tpda &t);

    const SymbolicPda &symbolic() const { return symbolic_; }
    TranslationStats stats() const { return symbolic_.stats(); }

    std::set<std::uint32_t> reachable_states() const;
    std::set<std::string> reachable_state_names() const;

    // Throws ModelError when `target` is not a declared state.
    pda::Verdict verdict(const std::string &target) const;

private:
    SymbolicPda symbolic_;
    pda::Saturation saturation_;
};

pda::Verdict check_reachability(const tpda::Tpda &t, const std::string &target);

// Witness replay followed by a check that it ends in Plain(target).
bool witness_reaches(const SymbolicPda &sym, const pda::Witness &w, std::uint32_t target);

// Human-readable witness: one rule per line, with the stack of regions
// (topmost first) after every step that lands in a simulated state.
std::vector<std::string> render_witness(const SymbolicPda &sym, const pda::Witness &w, bool with_snapshots);

} // namespace tpdareach::translation

#include "tpdareach/core_automata.hpp"

#include "tpdareach/errors.hpp"

#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace tpdareach::pda {

namespace {

std::string state_str(StateId s) { return "state #" + std::to_string(s.value); }

bool enabled(const StackOp &op, const std::vector<SymbolId> &stack) {
    switch (op.kind) {
    case StackOp::Kind::Push:
    case StackOp::Kind::Nop:
        return true;
    case StackOp::Kind::Pop:
        return !stack.empty() && stack.front() == op.symbol;
    }
    return false;
}

void apply(const PdaRule &r, PdaConfig &c) {
    switch (r.op.kind) {
    case StackOp::Kind::Push:
        c.stack.insert(c.stack.begin(), r.op.symbol);
        break;
    case StackOp::Kind::Pop:
        c.stack.erase(c.stack.begin());
        break;
    case StackOp::Kind::Nop:
        break;
    }
    c.state = r.dst;
}

std::optional<SymbolId> top_of(const PdaConfig &c) {
    if (c.stack.empty())
        return std::nullopt;
    return c.stack.front();
}

} // namespace

std::string to_string(const StackOp &op) {
    switch (op.kind) {
    case StackOp::Kind::Push:
        return "push(" + std::to_string(op.symbol.value) + ")";
    case StackOp::Kind::Pop:
        return "pop(" + std::to_string(op.symbol.value) + ")";
    case StackOp::Kind::Nop:
        return "nop";
    }
    return "?";
}

Pda Pda::from_rules(std::size_t num_states, StateId init, std::size_t num_symbols, std::vector<PdaRule> rules) {
    std::vector<std::string> errors;
    if (init.value >= num_states)
        errors.push_back("initial " + state_str(init) + " is not declared");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto &r = rules[i];
        const auto where = "rule " + std::to_string(i) + ": ";
        if (r.src.value >= num_states)
            errors.push_back(where + "undeclared source " + state_str(r.src));
        if (r.dst.value >= num_states)
            errors.push_back(where + "undeclared target " + state_str(r.dst));
        if (r.op.kind != StackOp::Kind::Nop && r.op.symbol.value >= num_symbols)
            errors.push_back(where + "undeclared symbol #" + std::to_string(r.op.symbol.value));
    }
    if (!errors.empty()) {
        auto message = "invalid pushdown automaton: " + errors.front();
        throw ModelError(message, std::move(errors));
    }

    Pda pda;
    pda.init_ = init;
    pda.num_states_ = num_states;
    pda.num_symbols_ = num_symbols;
    pda.rules_ = std::move(rules);
    pda.rules_by_src_.resize(num_states);
    pda.has_pop_.assign(num_states, false);
    for (std::size_t i = 0; i < pda.rules_.size(); ++i) {
        pda.rules_by_src_[pda.rules_[i].src.value].push_back(i);
        if (pda.rules_[i].op.kind == StackOp::Kind::Pop)
            pda.has_pop_[pda.rules_[i].src.value] = true;
    }
    return pda;
}

Pda Pda::from_generator(StateId init, RuleGenerator generator, StatePredicate declared, StatePredicate reads_top) {
    if (!generator || !declared)
        throw ModelError("generator-backed automaton needs a generator and a state predicate");
    if (!declared(init))
        throw ModelError("initial " + state_str(init) + " is not declared");
    Pda pda;
    pda.init_ = init;
    pda.generator_ = std::move(generator);
    pda.declared_ = std::move(declared);
    pda.reads_top_ = std::move(reads_top);
    return pda;
}

bool Pda::reads_top(StateId s) const {
    if (generator_)
        return !reads_top_ || reads_top_(s);
    return s.value < num_states_ && has_pop_[s.value];
}

bool Pda::declares(StateId s) const {
    if (generator_)
        return declared_(s);
    return s.value < num_states_;
}

std::vector<PdaRule> Pda::rules_for(StateId state, std::optional<SymbolId> top) const {
    if (!declares(state))
        throw ModelError("unknown " + state_str(state));
    std::vector<PdaRule> out;
    if (!generator_) {
        for (auto idx : rules_by_src_[state.value]) {
            const auto &r = rules_[idx];
            if (r.op.kind == StackOp::Kind::Pop && (!top || *top != r.op.symbol))
                continue;
            out.push_back(r);
        }
        return out;
    }
    out = generator_(state, top);
    for (const auto &r : out) {
        if (r.src != state)
            throw ModelError("generator returned a rule from " + state_str(r.src) + " when asked for " +
                             state_str(state));
        if (!declared_(r.dst))
            throw ModelError("generator returned a rule to undeclared " + state_str(r.dst));
    }
    return out;
}

std::set<PdaConfig> pda_step(const Pda &pda, const PdaConfig &c) {
    std::set<PdaConfig> out;
    for (const auto &r : pda.rules_for(c.state, top_of(c))) {
        if (!enabled(r.op, c.stack))
            continue;
        PdaConfig next = c;
        apply(r, next);
        out.insert(std::move(next));
    }
    return out;
}

std::set<PdaConfig> bounded_bfs(const Pda &pda, std::size_t max_steps) {
    std::set<PdaConfig> seen{PdaConfig{pda.init(), {}}};
    std::vector<PdaConfig> frontier{PdaConfig{pda.init(), {}}};
    for (std::size_t depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
        std::vector<PdaConfig> next;
        for (const auto &c : frontier)
            for (auto &succ : pda_step(pda, c))
                if (seen.insert(succ).second)
                    next.push_back(succ);
        frontier = std::move(next);
    }
    return seen;
}

ReplayResult witness_replay(const Pda &pda, const Witness &w) {
    PdaConfig c{pda.init(), {}};
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const auto &r = w.steps[i];
        if (r.src != c.state)
            return ReplayFailure{i, "rule starts in " + state_str(r.src) + " but automaton is in " + state_str(c.state)};
        if (r.op.kind == StackOp::Kind::Pop) {
            if (c.stack.empty())
                return ReplayFailure{i, "pop on empty stack"};
            if (c.stack.front() != r.op.symbol)
                return ReplayFailure{i, "pop of symbol #" + std::to_string(r.op.symbol.value) +
                                            " but top is #" + std::to_string(c.stack.front().value)};
        }
        // The rule must be one the automaton actually offers here.
        bool offered = false;
        for (const auto &cand : pda.rules_for(c.state, top_of(c)))
            if (cand == r) {
                offered = true;
                break;
            }
        if (!offered)
            return ReplayFailure{i, "rule is not offered by the automaton in this configuration"};
        apply(r, c);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Saturation

namespace {

using FactId = std::uint32_t;
using NodeId = std::uint32_t; // stack node of the configuration automaton
constexpr NodeId kBottomNode = 0;
constexpr std::uint32_t kEmpty = 0xffffffffu;  // no symbol above the node
constexpr std::uint32_t kPopped = 0xfffffffeu; // top not yet looked at

// Below the entry symbol of a node sits `top` followed by the stack of
// `below`; `fact` is the head that pushed.
struct Edge {
    std::uint32_t top;
    NodeId below;
    FactId fact;
    PdaRule push;
};

struct Node {
    std::vector<Edge> edges;
    std::vector<FactId> listeners;
};

struct Derivation {
    enum class Kind : std::uint8_t { Base, Step, Entry, Resolve, Read } kind = Kind::Base;
    FactId prev = 0;   // Step; Resolve, Read: popped head
    PdaRule rule{};    // Step
    NodeId node = 0;   // Resolve
    std::uint32_t edge = 0;
};

// The automaton is in `state`, the topmost symbol is `top` and the rest of
// the stack is described by `node`. A popped head leaves the whole stack to
// `node`. Every head is reached by a run that starts at the entry of its node
// and never looks below it.
struct Fact {
    StateId state;
    std::uint32_t top;
    NodeId node;
    Derivation how;
};

struct Key {
    std::uint32_t state, top, node;
    bool operator==(const Key &) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key &k) const noexcept {
        std::uint64_t h = (std::uint64_t(k.state) << 32 | k.top) * 0x9e3779b97f4a7c15ull;
        h ^= std::uint64_t(k.node) * 0xc2b2ae3d27d4eb4full;
        return std::size_t(h ^ (h >> 29));
    }
};

std::uint64_t pack(std::uint32_t a, std::uint32_t b) { return (std::uint64_t(a) << 32) | b; }

} // namespace

struct Saturation::Impl {
    Pda pda;
    std::vector<Node> nodes;
    std::unordered_map<std::uint64_t, NodeId> node_index;
    std::unordered_set<Key, KeyHash> edge_index;
    std::vector<Fact> facts;
    std::unordered_map<Key, FactId, KeyHash> fact_index;
    std::unordered_map<std::uint32_t, FactId> first_fact;
    std::deque<FactId> worklist;
    std::size_t rule_queries = 0;
    bool done = false;

    explicit Impl(Pda p) : pda(std::move(p)) {
        nodes.emplace_back();
        add_fact(pda.init(), kEmpty, kBottomNode, Derivation{});
    }

    void add_fact(StateId s, std::uint32_t top, NodeId n, const Derivation &how) {
        auto [it, fresh] = fact_index.try_emplace(Key{s.value, top, n}, FactId(facts.size()));
        if (!fresh)
            return;
        facts.push_back(Fact{s, top, n, how});
        first_fact.try_emplace(s.value, it->second);
        worklist.push_back(it->second);
    }

    Derivation step(FactId prev, const PdaRule &r) const { return {Derivation::Kind::Step, prev, r, 0, 0}; }

    void resolve(FactId popped, NodeId n, std::uint32_t e) {
        const Edge &edge = nodes[n].edges[e];
        add_fact(facts[popped].state, edge.top, edge.below, Derivation{Derivation::Kind::Resolve, popped, {}, n, e});
    }

    void push(FactId fid, const PdaRule &r) {
        const std::uint32_t top = facts[fid].top;
        const NodeId below = facts[fid].node;
        if (top == kPopped) {
            add_fact(r.dst, r.op.symbol.value, below, step(fid, r));
            return;
        }
        auto [it, fresh] = node_index.try_emplace(pack(r.dst.value, r.op.symbol.value), NodeId(nodes.size()));
        const NodeId callee = it->second;
        if (fresh)
            nodes.emplace_back();
        if (!edge_index.insert(Key{callee, top, below}).second)
            return;
        nodes[callee].edges.push_back(Edge{top, below, fid, r});
        const auto e = std::uint32_t(nodes[callee].edges.size() - 1);
        if (fresh) {
            add_fact(r.dst, r.op.symbol.value, callee, Derivation{Derivation::Kind::Entry, 0, {}, 0, 0});
            return;
        }
        for (std::size_t i = 0; i < nodes[callee].listeners.size(); ++i)
            resolve(nodes[callee].listeners[i], callee, e);
    }

    void process(FactId fid) {
        const StateId s = facts[fid].state;
        const std::uint32_t top = facts[fid].top;
        const NodeId n = facts[fid].node;
        if (top == kPopped && pda.reads_top(s)) {
            if (n == kBottomNode) {
                add_fact(s, kEmpty, n, Derivation{Derivation::Kind::Read, fid, {}, 0, 0});
                return;
            }
            nodes[n].listeners.push_back(fid);
            for (std::uint32_t e = 0; e < nodes[n].edges.size(); ++e)
                resolve(fid, n, e);
            return;
        }
        std::optional<SymbolId> sym;
        if (top != kPopped && top != kEmpty)
            sym = SymbolId{top};
        ++rule_queries;
        for (const auto &r : pda.rules_for(s, sym)) {
            switch (r.op.kind) {
            case StackOp::Kind::Nop:
                add_fact(r.dst, top, n, step(fid, r));
                break;
            case StackOp::Kind::Push:
                push(fid, r);
                break;
            case StackOp::Kind::Pop:
                if (sym && *sym == r.op.symbol)
                    add_fact(r.dst, kPopped, n, step(fid, r));
                break;
            }
        }
    }

    void run() {
        if (done)
            return;
        while (!worklist.empty()) {
            const FactId f = worklist.front();
            worklist.pop_front();
            process(f);
        }
        done = true;
    }

    Witness witness(FactId target) const {
        // Explicit work stack: derivation chains can be long.
        struct Task {
            enum class Kind : std::uint8_t { Emit, Same, Prefix } kind;
            std::uint32_t id;
            PdaRule rule;
        };
        Witness w;
        std::vector<Task> stack;
        stack.push_back({Task::Kind::Same, target, {}});
        stack.push_back({Task::Kind::Prefix, facts[target].node, {}});
        while (!stack.empty()) {
            const Task t = stack.back();
            stack.pop_back();
            switch (t.kind) {
            case Task::Kind::Emit:
                w.steps.push_back(t.rule);
                break;
            case Task::Kind::Prefix: {
                if (t.id == kBottomNode)
                    break;
                const Edge &e = nodes[t.id].edges.front();
                stack.push_back({Task::Kind::Emit, 0, e.push});
                stack.push_back({Task::Kind::Same, e.fact, {}});
                stack.push_back({Task::Kind::Prefix, facts[e.fact].node, {}});
                break;
            }
            case Task::Kind::Same: {
                const Derivation &d = facts[t.id].how;
                switch (d.kind) {
                case Derivation::Kind::Base:
                case Derivation::Kind::Entry:
                    break;
                case Derivation::Kind::Step:
                    stack.push_back({Task::Kind::Emit, 0, d.rule});
                    stack.push_back({Task::Kind::Same, d.prev, {}});
                    break;
                case Derivation::Kind::Read:
                    stack.push_back({Task::Kind::Same, d.prev, {}});
                    break;
                case Derivation::Kind::Resolve: {
                    const Edge &e = nodes[d.node].edges[d.edge];
                    stack.push_back({Task::Kind::Same, d.prev, {}});
                    stack.push_back({Task::Kind::Emit, 0, e.push});
                    stack.push_back({Task::Kind::Same, e.fact, {}});
                    break;
                }
                }
                break;
            }
            }
        }
        return w;
    }
};

Saturation::Saturation(const Pda &pda) : impl_(std::make_unique<Impl>(pda)) {}
Saturation::~Saturation() = default;
Saturation::Saturation(Saturation &&) noexcept = default;
Saturation &Saturation::operator=(Saturation &&) noexcept = default;

void Saturation::run() { impl_->run(); }

std::set<StateId> Saturation::reachable_states() const {
    std::set<StateId> out;
    for (const auto &[s, f] : impl_->first_fact)
        out.insert(StateId{s});
    return out;
}

bool Saturation::reached(StateId s) const { return impl_->first_fact.count(s.value) != 0; }

std::optional<Witness> Saturation::witness_for(StateId s) const {
    auto it = impl_->first_fact.find(s.value);
    if (it == impl_->first_fact.end())
        return std::nullopt;
    return impl_->witness(it->second);
}

Saturation::Counters Saturation::counters() const {
    return Counters{impl_->facts.size(), impl_->nodes.size() - 1, impl_->rule_queries};
}

std::set<StateId> reachable_states(const Pda &pda) {
    Saturation sat(pda);
    sat.run();
    return sat.reachable_states();
}

Verdict is_state_reachable(const Pda &pda, StateId target) {
    if (!pda.declares(target))
        throw ModelError("target " + state_str(target) + " is not declared");
    Saturation sat(pda);
    sat.run();
    if (auto w = sat.witness_for(target))
        return Reachable{std::move(*w)};
    return Unreachable{};
}

} // namespace tpdareach::pda

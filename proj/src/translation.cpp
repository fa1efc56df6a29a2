#include "tpdareach/translation.hpp"

#include "tpdareach/errors.hpp"

#include <boost/functional/hash.hpp>

#include <map>
#include <unordered_map>
#include <unordered_set>

namespace tpdareach::translation {

using pda::PdaRule;
using pda::StackOp;
using pda::StateId;
using pda::SymbolId;
using regions::Entry;
using regions::Item;
using regions::ItemKind;
using regions::ItemSet;
using regions::Shape;

// ---------------------------------------------------------------------------
// Region-level steps

Region initial_region(const tpda::IndexedTpda &t) {
    ItemSet zero{{Item::ref(), regions::Val::of(0)}};
    for (std::size_t c = 0; c < t.num_clocks(); ++c)
        zero.push_back({Item::clock(static_cast<std::uint16_t>(c)), regions::Val::of(0)});
    return Region({std::move(zero)}, t.cmax());
}

std::set<Region> push_successors(const Region &top, std::uint16_t symbol, const Interval &iv) {
    std::vector<ItemSet> sets;
    for (const auto &s : top.sets()) {
        ItemSet next;
        for (const auto &e : s) {
            if (e.item.is_shadow())
                continue;
            if (e.item.kind == ItemKind::Sym) {
                next.push_back({e.item.shadow(), e.val});
                continue;
            }
            next.push_back(e);
            next.push_back({e.item.shadow(), e.val});
        }
        sets.push_back(std::move(next));
    }
    const Region base = Region::normalized(std::move(sets), top.cmax());
    return regions::place_item(base, Item::sym(symbol), iv);
}

namespace {

// Plain items of the lower region, in place.
Region lower_skeleton(const Region &lower) {
    return regions::project(lower, [](const Item &it) -> std::optional<Item> {
        if (it.is_shadow())
            return std::nullopt;
        return it;
    });
}

// Shadows of the upper region, renamed to the plain items they mirror.
Region upper_skeleton(const Region &upper) {
    return regions::project(upper, [](const Item &it) -> std::optional<Item> {
        if (!it.is_shadow())
            return std::nullopt;
        return it.plain();
    });
}

// A region cut along its skeleton sets: the kept items sitting on each
// skeleton point, and the ordered sets of kept items in the gap after it.
struct Cut {
    std::vector<ItemSet> anchors;
    std::vector<std::vector<ItemSet>> gaps;
};

template <typename IsSkeleton, typename IsKept>
Cut cut(const Region &r, IsSkeleton is_skeleton, IsKept is_kept) {
    Cut out;
    const auto &sets = r.sets();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        bool anchor = i == 0;
        for (const auto &e : sets[i])
            anchor = anchor || is_skeleton(e.item);
        ItemSet kept;
        for (const auto &e : sets[i])
            if (is_kept(e.item))
                kept.push_back(e);
        if (anchor) {
            out.anchors.push_back(std::move(kept));
            out.gaps.emplace_back();
        } else if (!kept.empty()) {
            out.gaps.back().push_back(std::move(kept));
        }
    }
    return out;
}

ItemSet join(const ItemSet &a, const ItemSet &b) {
    ItemSet out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Every order-preserving interleaving of two chains of sets, where a set of
// one chain may also coincide with a set of the other.
void interleave(const std::vector<ItemSet> &a, const std::vector<ItemSet> &b, std::size_t i, std::size_t j,
                std::vector<ItemSet> &prefix, std::vector<std::vector<ItemSet>> &out) {
    if (i == a.size() && j == b.size()) {
        out.push_back(prefix);
        return;
    }
    if (i < a.size()) {
        prefix.push_back(a[i]);
        interleave(a, b, i + 1, j, prefix, out);
        prefix.pop_back();
    }
    if (j < b.size()) {
        prefix.push_back(b[j]);
        interleave(a, b, i, j + 1, prefix, out);
        prefix.pop_back();
    }
    if (i < a.size() && j < b.size()) {
        prefix.push_back(join(a[i], b[j]));
        interleave(a, b, i + 1, j + 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<std::pair<std::size_t, Region>> refresh(const Region &lower, const Region &upper) {
    const Region target = upper_skeleton(upper);
    std::vector<std::pair<std::size_t, Region>> out;
    std::unordered_set<Region, regions::RegionHash> seen;
    Region cur = lower;
    for (std::size_t k = 0; seen.insert(cur).second; ++k) {
        if (lower_skeleton(cur) == target)
            out.emplace_back(k, cur);
        cur = regions::rotate(cur, true);
    }
    return out;
}

std::set<Region> merge(const Region &lower_rot, const Region &upper) {
    if (lower_skeleton(lower_rot) != upper_skeleton(upper))
        throw DomainError("merge: lower region is not aligned with the shadows of the upper region");

    // Lower keeps its stack symbol (on a skeleton point) and its shadows.
    const Cut low = cut(
        lower_rot, [](const Item &it) { return !it.is_shadow(); },
        [](const Item &it) { return it.is_shadow() || it.kind == ItemKind::Sym; });
    // Upper keeps its clocks and the reference item.
    const Cut up = cut(
        upper, [](const Item &it) { return it.is_shadow(); },
        [](const Item &it) { return !it.is_shadow() && it.kind != ItemKind::Sym; });
    if (low.anchors.size() != up.anchors.size())
        throw InvariantViolation("merge: skeleton point counts differ");

    std::vector<std::vector<std::vector<ItemSet>>> gap_options;
    for (std::size_t g = 0; g < low.gaps.size(); ++g) {
        std::vector<std::vector<ItemSet>> options;
        std::vector<ItemSet> prefix;
        interleave(low.gaps[g], up.gaps[g], 0, 0, prefix, options);
        gap_options.push_back(std::move(options));
    }

    std::set<Region> out;
    std::vector<std::size_t> choice(gap_options.size(), 0);
    for (;;) {
        std::vector<ItemSet> sets;
        for (std::size_t g = 0; g < low.anchors.size(); ++g) {
            sets.push_back(join(low.anchors[g], up.anchors[g]));
            for (const auto &s : gap_options[g][choice[g]])
                sets.push_back(s);
        }
        out.insert(Region::normalized(std::move(sets), upper.cmax()));

        std::size_t g = 0;
        while (g < choice.size() && ++choice[g] == gap_options[g].size())
            choice[g++] = 0;
        if (g == choice.size())
            break;
    }
    return out;
}

std::set<Region> pop_successors(const Region &lower, const Region &upper) {
    std::set<Region> out;
    for (const auto &[k, rotated] : refresh(lower, upper))
        for (auto &m : merge(rotated, upper))
            out.insert(std::move(m));
    return out;
}

// ---------------------------------------------------------------------------
// Symbolic automaton

namespace {

struct StateHash {
    std::size_t operator()(const SymbolicState &s) const {
        std::size_t h = static_cast<std::size_t>(s.kind);
        boost::hash_combine(h, s.state);
        boost::hash_combine(h, s.first.value);
        boost::hash_combine(h, s.second.value);
        return h;
    }
};

bool on_stack_discipline(const Region &r) {
    const auto shape = r.shape();
    if (shape != Shape::Bottom && shape != Shape::Stack)
        return false;
    const auto ref = r.find(Item::ref());
    return ref && ref->zero_fraction() && ref->val == regions::Val::of(0);
}

} // namespace

struct SymbolicPda::Impl {
    tpda::IndexedTpda tpda;
    regions::ItemNames names;
    std::vector<Region> symbols;
    std::unordered_map<Region, SymbolId, regions::RegionHash> symbol_ids;
    std::vector<SymbolicState> states;
    std::unordered_map<SymbolicState, StateId, StateHash> state_ids;
    std::unordered_map<std::uint64_t, std::vector<PdaRule>> cache;
    std::size_t rules_generated = 0;
    // Rotations of a lower region, grouped by the skeleton they show.
    using Rotations = std::unordered_map<Region, std::vector<Region>, regions::RegionHash>;
    std::unordered_map<std::uint32_t, Rotations> rotations;
    std::optional<pda::Pda> automaton;

    explicit Impl(const tpda::Tpda &t) : tpda(t) {
        names.clocks = tpda.model().clocks;
        names.symbols = tpda.model().alphabet;
        intern_state({SymbolicState::Kind::Start, 0, {}, {}});
        for (std::uint32_t s = 0; s < tpda.num_states(); ++s)
            intern_state({SymbolicState::Kind::Plain, s, {}, {}});
    }

    StateId intern_state(const SymbolicState &s) {
        auto [it, fresh] = state_ids.try_emplace(s, StateId{static_cast<std::uint32_t>(states.size())});
        if (fresh)
            states.push_back(s);
        return it->second;
    }

    SymbolId intern(const Region &r) {
        auto [it, fresh] = symbol_ids.try_emplace(r, SymbolId{static_cast<std::uint32_t>(symbols.size())});
        if (fresh) {
            if (!on_stack_discipline(r))
                throw InvariantViolation("region breaks the stack discipline: " + regions::render(r, names));
            symbols.push_back(r);
        }
        return it->second;
    }

    StateId plain(std::uint32_t s) const { return StateId{s + 1}; }

    // pop(top), then push `next` and continue in Plain(dst).
    PdaRule replace_top(std::uint32_t src, SymbolId top, const Region &next, std::uint32_t dst) {
        const auto mid = intern_state({SymbolicState::Kind::PushThen, dst, intern(next), {}});
        return PdaRule{plain(src), StackOp::pop(top), mid};
    }

    std::vector<PdaRule> timed(std::uint32_t s, SymbolId top) {
        return {replace_top(s, top, regions::rotate(symbols[top.value], false), s)};
    }

    std::vector<PdaRule> family(std::size_t idx, SymbolId top) {
        const auto &rule = tpda.rules()[idx];
        const Region r = symbols[top.value];
        std::vector<PdaRule> out;
        switch (rule.kind) {
        case tpda::TpdaOp::Kind::Nop:
            out.push_back(PdaRule{plain(rule.src), StackOp::nop(), plain(rule.dst)});
            break;
        case tpda::TpdaOp::Kind::Test:
            if (regions::satisfies(r, Item::clock(rule.target), rule.interval))
                out.push_back(replace_top(rule.src, top, r, rule.dst));
            break;
        case tpda::TpdaOp::Kind::Reset:
            for (const auto &next : regions::reset_insert(r, Item::clock(rule.target), rule.interval))
                out.push_back(replace_top(rule.src, top, next, rule.dst));
            break;
        case tpda::TpdaOp::Kind::Push:
            for (const auto &fresh : push_successors(r, rule.target, rule.interval)) {
                const auto mid = intern_state({SymbolicState::Kind::PushTwo, rule.dst, top, intern(fresh)});
                out.push_back(PdaRule{plain(rule.src), StackOp::pop(top), mid});
            }
            break;
        case tpda::TpdaOp::Kind::Pop: {
            const auto sym = r.plain_symbol();
            if (r.shape() != Shape::Stack || !sym || *sym != Item::sym(rule.target))
                break;
            if (!regions::satisfies(r, *sym, rule.interval))
                break;
            const auto mid = intern_state({SymbolicState::Kind::AwaitLower, rule.dst, top, {}});
            out.push_back(PdaRule{plain(rule.src), StackOp::pop(top), mid});
            break;
        }
        }
        return out;
    }

    std::vector<PdaRule> generate(StateId sid, std::optional<SymbolId> top) {
        const SymbolicState st = states[sid.value];
        std::vector<PdaRule> out;
        switch (st.kind) {
        case SymbolicState::Kind::Start:
            out.push_back(PdaRule{sid, StackOp::push(intern(initial_region(tpda))), plain(tpda.init())});
            break;
        case SymbolicState::Kind::Plain:
            if (!top)
                break;
            out = timed(st.state, *top);
            for (auto idx : tpda.rules_from(st.state))
                for (const auto &r : family(idx, *top))
                    out.push_back(r);
            break;
        case SymbolicState::Kind::PushThen:
            out.push_back(PdaRule{sid, StackOp::push(st.first), plain(st.state)});
            break;
        case SymbolicState::Kind::PushTwo: {
            const auto then = intern_state({SymbolicState::Kind::PushThen, st.state, st.second, {}});
            out.push_back(PdaRule{sid, StackOp::push(st.first), then});
            break;
        }
        case SymbolicState::Kind::AwaitLower:
            if (!top)
                break;
            for (const auto &m : pop_successors(*top, st.first)) {
                const auto then = intern_state({SymbolicState::Kind::PushThen, st.state, intern(m), {}});
                out.push_back(PdaRule{sid, StackOp::pop(*top), then});
            }
            break;
        }
        return out;
    }

    // Only simulated states and pending pops look at the top region.
    bool reads_top(StateId sid) const {
        const auto kind = states[sid.value].kind;
        return kind == SymbolicState::Kind::Plain || kind == SymbolicState::Kind::AwaitLower;
    }

    const Rotations &rotations_of(SymbolId lower) {
        auto [it, fresh] = rotations.try_emplace(lower.value);
        if (fresh) {
            std::unordered_set<Region, regions::RegionHash> seen;
            for (Region cur = symbols[lower.value]; seen.insert(cur).second; cur = regions::rotate(cur, true))
                it->second[lower_skeleton(cur)].push_back(cur);
        }
        return it->second;
    }

    // Same as the free pop_successors, with the lower rotations cached.
    std::set<Region> pop_successors(SymbolId lower, SymbolId upper) {
        const Region &up = symbols[upper.value];
        std::set<Region> out;
        const auto &rot = rotations_of(lower);
        auto it = rot.find(upper_skeleton(up));
        if (it == rot.end())
            return out;
        for (const auto &rotated : it->second)
            for (auto &m : merge(rotated, up))
                out.insert(std::move(m));
        return out;
    }

    const std::vector<PdaRule> &rules_for(StateId sid, std::optional<SymbolId> top) {
        const std::uint64_t key = (std::uint64_t(sid.value) << 32) | (reads_top(sid) && top ? top->value + 1u : 0u);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
        auto rules = generate(sid, top);
        rules_generated += rules.size();
        return cache.emplace(key, std::move(rules)).first->second;
    }
};

SymbolicPda::SymbolicPda(const tpda::Tpda &t) : impl_(std::make_shared<Impl>(t)) {
    std::weak_ptr<Impl> weak = impl_;
    impl_->automaton = pda::Pda::from_generator(
        StateId{0},
        [weak](StateId s, std::optional<SymbolId> top) {
            auto impl = weak.lock();
            if (!impl)
                throw InvariantViolation("symbolic automaton used after its tables were released");
            return impl->rules_for(s, top);
        },
        [weak](StateId s) {
            auto impl = weak.lock();
            return impl && s.value < impl->states.size();
        },
        [weak](StateId s) {
            auto impl = weak.lock();
            return impl && impl->reads_top(s);
        });
}

const tpda::IndexedTpda &SymbolicPda::tpda() const { return impl_->tpda; }
const pda::Pda &SymbolicPda::pda() const { return *impl_->automaton; }
StateId SymbolicPda::start() const { return StateId{0}; }

StateId SymbolicPda::plain_state(std::uint32_t tpda_state) const {
    if (tpda_state >= impl_->tpda.num_states())
        throw ModelError("undeclared tpda state #" + std::to_string(tpda_state));
    return impl_->plain(tpda_state);
}

const SymbolicState &SymbolicPda::state(StateId s) const { return impl_->states.at(s.value); }
const Region &SymbolicPda::region(SymbolId a) const { return impl_->symbols.at(a.value); }
SymbolId SymbolicPda::symbol_of(const Region &r) const { return impl_->intern(r); }

std::vector<PdaRule> SymbolicPda::timed_rules(std::uint32_t s, SymbolId top) const { return impl_->timed(s, top); }

std::vector<PdaRule> SymbolicPda::rule_family(std::size_t tpda_rule, SymbolId top) const {
    return impl_->family(tpda_rule, top);
}

std::vector<PdaRule> SymbolicPda::rules_for(StateId s, std::optional<SymbolId> top) const {
    return impl_->rules_for(s, top);
}

TranslationStats SymbolicPda::stats() const {
    return TranslationStats{impl_->symbols.size(), impl_->states.size() - 1 - impl_->tpda.num_states(),
                            impl_->rules_generated};
}

std::string SymbolicPda::state_name(StateId s) const {
    const auto &st = state(s);
    switch (st.kind) {
    case SymbolicState::Kind::Start:
        return "<start>";
    case SymbolicState::Kind::Plain:
        return impl_->tpda.state_name(st.state);
    default:
        return "<mid" + std::to_string(s.value) + ">";
    }
}

std::string SymbolicPda::render_region(SymbolId a) const { return regions::render(region(a), impl_->names); }

std::string SymbolicPda::render_rule(const PdaRule &r) const {
    std::string op;
    switch (r.op.kind) {
    case StackOp::Kind::Push:
        op = "push " + render_region(r.op.symbol);
        break;
    case StackOp::Kind::Pop:
        op = "pop " + render_region(r.op.symbol);
        break;
    case StackOp::Kind::Nop:
        op = "nop";
        break;
    }
    return state_name(r.src) + " -> " + state_name(r.dst) + " : " + op;
}

// ---------------------------------------------------------------------------
// Analysis

Analysis::Analysis(const tpda::Tpda &t) : symbolic_(t), saturation_(symbolic_.pda()) { saturation_.run(); }

std::set<std::uint32_t> Analysis::reachable_states() const {
    std::set<std::uint32_t> out;
    for (std::uint32_t s = 0; s < symbolic_.tpda().num_states(); ++s)
        if (saturation_.reached(symbolic_.plain_state(s)))
            out.insert(s);
    return out;
}

std::set<std::string> Analysis::reachable_state_names() const {
    std::set<std::string> out;
    for (auto s : reachable_states())
        out.insert(symbolic_.tpda().state_name(s));
    return out;
}

pda::Verdict Analysis::verdict(const std::string &target) const {
    const auto idx = symbolic_.tpda().state_index(target);
    if (!idx)
        throw ModelError("target state '" + target + "' is not declared");
    if (auto w = saturation_.witness_for(symbolic_.plain_state(*idx)))
        return pda::Reachable{std::move(*w)};
    return pda::Unreachable{};
}

pda::Verdict check_reachability(const tpda::Tpda &t, const std::string &target) {
    if (!tpda::IndexedTpda(t).state_index(target))
        throw ModelError("target state '" + target + "' is not declared");
    return Analysis(t).verdict(target);
}

bool witness_reaches(const SymbolicPda &sym, const pda::Witness &w, std::uint32_t target) {
    const auto result = pda::witness_replay(sym.pda(), w);
    const auto *final = std::get_if<pda::PdaConfig>(&result);
    return final && final->state == sym.plain_state(target);
}

std::vector<std::string> render_witness(const SymbolicPda &sym, const pda::Witness &w, bool with_snapshots) {
    std::vector<std::string> out;
    pda::PdaConfig c{sym.start(), {}};
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const auto &r = w.steps[i];
        out.push_back(std::to_string(i) + ": " + sym.render_rule(r));
        switch (r.op.kind) {
        case StackOp::Kind::Push:
            c.stack.insert(c.stack.begin(), r.op.symbol);
            break;
        case StackOp::Kind::Pop:
            if (!c.stack.empty())
                c.stack.erase(c.stack.begin());
            break;
        case StackOp::Kind::Nop:
            break;
        }
        c.state = r.dst;
        if (with_snapshots && sym.state(c.state).kind == SymbolicState::Kind::Plain) {
            for (std::size_t j = 0; j < c.stack.size(); ++j)
                out.push_back(std::string(j == 0 ? "     top  " : "          ") + sym.render_region(c.stack[j]));
        }
    }
    return out;
}

} // namespace tpdareach::translation

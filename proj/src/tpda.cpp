#include "tpdareach/tpda.hpp"

#include "tpdareach/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace tpdareach::tpda {

namespace {

const char *kind_name(TpdaOp::Kind k) {
    switch (k) {
    case TpdaOp::Kind::Nop:
        return "nop";
    case TpdaOp::Kind::Test:
        return "test";
    case TpdaOp::Kind::Reset:
        return "reset";
    case TpdaOp::Kind::Push:
        return "push";
    case TpdaOp::Kind::Pop:
        return "pop";
    }
    return "?";
}

std::uint32_t max_constant(const Tpda &t) {
    std::uint32_t m = 0;
    for (const auto &r : t.rules) {
        if (r.op.kind == TpdaOp::Kind::Nop)
            continue;
        m = std::max(m, r.op.interval.lo);
        if (r.op.interval.hi)
            m = std::max(m, *r.op.interval.hi);
    }
    return m;
}

} // namespace

std::string to_string(const TpdaOp &op) {
    if (op.kind == TpdaOp::Kind::Nop)
        return "nop";
    return std::string(kind_name(op.kind)) + "(" + op.name + ", " + op.interval.to_string() + ")";
}

std::string to_string(const TpdaRule &r) { return r.src + " -> " + r.dst + " : " + to_string(r.op); }

std::vector<std::string> validate(const Tpda &t) {
    std::vector<std::string> errors;
    auto declared = [](const std::vector<std::string> &names, const std::string &n) {
        return std::find(names.begin(), names.end(), n) != names.end();
    };
    auto duplicates = [&errors](const std::vector<std::string> &names, const char *what) {
        std::unordered_set<std::string> seen;
        for (const auto &n : names)
            if (!seen.insert(n).second)
                errors.push_back(std::string("duplicate ") + what + " '" + n + "'");
    };
    duplicates(t.states, "state");
    duplicates(t.clocks, "clock");
    duplicates(t.alphabet, "symbol");
    if (!declared(t.states, t.init))
        errors.push_back("initial state '" + t.init + "' is not declared");

    for (std::size_t i = 0; i < t.rules.size(); ++i) {
        const auto &r = t.rules[i];
        const auto where = "rule " + std::to_string(i) + " (" + to_string(r) + "): ";
        if (!declared(t.states, r.src))
            errors.push_back(where + "undeclared state '" + r.src + "'");
        if (!declared(t.states, r.dst))
            errors.push_back(where + "undeclared state '" + r.dst + "'");
        if (r.op.uses_clock() && !declared(t.clocks, r.op.name))
            errors.push_back(where + "undeclared clock '" + r.op.name + "'");
        if (r.op.uses_symbol() && !declared(t.alphabet, r.op.name))
            errors.push_back(where + "undeclared stack symbol '" + r.op.name + "'");
        if (r.op.kind != TpdaOp::Kind::Nop && !r.op.interval.well_formed()) {
            if (r.op.interval.unbounded())
                errors.push_back(where + "infinite upper bound must be open");
            else
                errors.push_back(where + "empty interval " + r.op.interval.to_string());
        }
    }
    return errors;
}

IndexedTpda::IndexedTpda(Tpda model) : model_(std::move(model)) {
    auto errors = validate(model_);
    if (!errors.empty()) {
        auto message = "invalid timed pushdown automaton: " + errors.front();
        throw ModelError(message, std::move(errors));
    }

    auto index_of = [](const std::vector<std::string> &names, const std::string &n) {
        return static_cast<std::uint32_t>(std::find(names.begin(), names.end(), n) - names.begin());
    };
    for (std::uint32_t s = 0; s < model_.states.size(); ++s)
        state_ids_.emplace(model_.states[s], s);
    init_ = state_ids_.at(model_.init);
    cmax_ = max_constant(model_);
    by_src_.resize(model_.states.size());
    for (const auto &r : model_.rules) {
        IndexedRule ir;
        ir.src = state_ids_.at(r.src);
        ir.dst = state_ids_.at(r.dst);
        ir.kind = r.op.kind;
        ir.interval = r.op.interval;
        if (r.op.uses_clock())
            ir.target = static_cast<std::uint16_t>(index_of(model_.clocks, r.op.name));
        else if (r.op.uses_symbol())
            ir.target = static_cast<std::uint16_t>(index_of(model_.alphabet, r.op.name));
        by_src_[ir.src].push_back(rules_.size());
        rules_.push_back(ir);
    }
}

std::optional<std::uint32_t> IndexedTpda::state_index(const std::string &name) const {
    auto it = state_ids_.find(name);
    if (it == state_ids_.end())
        return std::nullopt;
    return it->second;
}

TpdaConfig initial_config(const IndexedTpda &t) {
    TpdaConfig c;
    c.state = t.init();
    c.clocks.assign(t.num_clocks(), Rational(0));
    return c;
}

TpdaConfig timed_step(const TpdaConfig &c, const Rational &d) {
    if (d <= Rational(0))
        throw DomainError("time must advance by a positive amount");
    TpdaConfig out = c;
    for (auto &v : out.clocks)
        v += d;
    for (auto &e : out.stack)
        e.age += d;
    return out;
}

std::set<TpdaConfig> discrete_step(const IndexedTpda &t, const TpdaConfig &c, std::uint32_t denominator) {
    if (denominator == 0)
        throw DomainError("grid denominator must be at least 1");
    if (c.state >= t.num_states())
        throw ModelError("configuration in undeclared state #" + std::to_string(c.state));

    const Rational limit(static_cast<std::int64_t>(t.cmax()) + 1);
    auto choices = [&](const Interval &iv) {
        std::vector<Rational> out;
        for (std::int64_t k = 0;; ++k) {
            Rational v(k, denominator);
            if (v > limit)
                break;
            if (iv.contains(v))
                out.push_back(v);
        }
        return out;
    };

    std::set<TpdaConfig> out;
    for (auto idx : t.rules_from(c.state)) {
        const auto &r = t.rules()[idx];
        switch (r.kind) {
        case TpdaOp::Kind::Nop: {
            TpdaConfig n = c;
            n.state = r.dst;
            out.insert(std::move(n));
            break;
        }
        case TpdaOp::Kind::Test:
            if (r.interval.contains(c.clocks[r.target])) {
                TpdaConfig n = c;
                n.state = r.dst;
                out.insert(std::move(n));
            }
            break;
        case TpdaOp::Kind::Reset:
            for (const auto &v : choices(r.interval)) {
                TpdaConfig n = c;
                n.state = r.dst;
                n.clocks[r.target] = v;
                out.insert(std::move(n));
            }
            break;
        case TpdaOp::Kind::Push:
            for (const auto &v : choices(r.interval)) {
                TpdaConfig n = c;
                n.state = r.dst;
                n.stack.insert(n.stack.begin(), StackEntry{r.target, v});
                out.insert(std::move(n));
            }
            break;
        case TpdaOp::Kind::Pop:
            if (!c.stack.empty() && c.stack.front().symbol == r.target && r.interval.contains(c.stack.front().age)) {
                TpdaConfig n = c;
                n.state = r.dst;
                n.stack.erase(n.stack.begin());
                out.insert(std::move(n));
            }
            break;
        }
    }
    return out;
}

} // namespace tpdareach::tpda

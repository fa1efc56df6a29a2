#include "tpdareach/errors.hpp"
#include "tpdareach/tpda.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace tpdareach::tpda {

namespace {

void check_options(const GridOracleOptions &opts) {
    if (opts.denominator == 0)
        throw DomainError("grid denominator must be at least 1");
}

bool finished(const std::set<std::uint32_t> &visited, const IndexedTpda &t, const GridOracleOptions &opts) {
    if (visited.size() == t.num_states())
        return true;
    if (opts.goal)
        return std::includes(visited.begin(), visited.end(), opts.goal->begin(), opts.goal->end());
    return false;
}

// Configuration in ticks of 1/denominator, flattened as
// [state, clocks..., (symbol, age)...] with the stack top at the end. Values
// are capped at (c_max+1)*denominator, above which every guard answers alike.
using Word = std::uint16_t;
using Ticks = std::vector<Word>;

constexpr std::size_t kChunk = 1 << 14;

// Successor records laid out as [length, words...].
using Batch = std::vector<Word>;

class TickKernel {
public:
    TickKernel(const IndexedTpda &t, std::uint32_t denominator)
        : t_(t), nclocks_(t.num_clocks()), cap_((std::uint64_t(t.cmax()) + 1) * denominator) {
        if (cap_ > std::numeric_limits<Word>::max() || t.num_states() > std::numeric_limits<Word>::max() ||
            t.num_symbols() > std::numeric_limits<Word>::max())
            throw DomainError("grid oracle: denominator or automaton too large for the tick encoding");
        allowed_.reserve(t.rules().size());
        for (const auto &r : t.rules()) {
            std::vector<char> ok(cap_ + 1);
            for (std::uint64_t k = 0; k <= cap_; ++k)
                ok[k] = r.interval.contains(Rational(std::int64_t(k), denominator));
            allowed_.push_back(std::move(ok));
        }
        poppable_.assign(t.num_symbols(), 0);
        for (const auto &r : t.rules())
            if (r.kind == TpdaOp::Kind::Pop)
                poppable_[r.target] = 1;
    }

    Ticks initial() const {
        Ticks c(1 + nclocks_, 0);
        c[0] = Word(t_.init());
        return c;
    }

    // All configurations one (delay, discrete transition) step away,
    // appended to `out`. Only the topmost `keep` stack entries are kept: no
    // more can be popped in the steps that remain. Ages of symbols that are
    // never popped are not tracked.
    void expand(const Word *c, std::size_t len, std::size_t keep, Batch &out) const {
        Ticks delayed(c, c + len);
        Batch raw;
        for (std::uint64_t delay = 0; delay <= cap_; ++delay) {
            for (std::size_t i = 1; i < len; ++i)
                if (ages(delayed, i))
                    delayed[i] = Word(std::min<std::uint64_t>(c[i] + delay, cap_));
            discrete(delayed, raw);
            if (all_capped(delayed))
                break; // longer delays change nothing
        }
        for (std::size_t at = 0; at < raw.size(); at += 1 + raw[at])
            normalize(raw.data() + at + 1, raw[at], keep, out);
    }

    // States reachable in one step; used for the last step, where the
    // configurations themselves are not needed.
    void targets(const Word *c, std::size_t len, std::vector<Word> &out) const {
        Ticks delayed(c, c + len);
        for (std::uint64_t delay = 0; delay <= cap_; ++delay) {
            for (std::size_t i = 1; i < len; ++i)
                if (ages(delayed, i))
                    delayed[i] = Word(std::min<std::uint64_t>(c[i] + delay, cap_));
            for (auto idx : t_.rules_from(delayed[0]))
                if (enabled(idx, delayed))
                    out.push_back(Word(t_.rules()[idx].dst));
            if (all_capped(delayed))
                break;
        }
    }

private:
    bool enabled(std::size_t idx, const Ticks &c) const {
        const auto &r = t_.rules()[idx];
        const auto &ok = allowed_[idx];
        switch (r.kind) {
        case TpdaOp::Kind::Nop:
            return true;
        case TpdaOp::Kind::Test:
            return ok[c[1 + r.target]];
        case TpdaOp::Kind::Reset:
        case TpdaOp::Kind::Push:
            return std::find(ok.begin(), ok.end(), 1) != ok.end();
        case TpdaOp::Kind::Pop:
            return c.size() > 1 + nclocks_ && c[c.size() - 2] == r.target && ok[c.back()];
        }
        return false;
    }

    bool is_symbol(std::size_t i) const { return i > nclocks_ && (i - nclocks_) % 2 == 1; }

    // Clocks and the ages of symbols that some rule pops.
    bool ages(const Ticks &c, std::size_t i) const {
        if (i <= nclocks_)
            return true;
        return !is_symbol(i) && poppable_[c[i - 1]];
    }

    bool all_capped(const Ticks &c) const {
        for (std::size_t i = 1; i < c.size(); ++i)
            if (ages(c, i) && c[i] < cap_)
                return false;
        return true;
    }

    void normalize(const Word *c, std::size_t len, std::size_t keep, Batch &out) const {
        const std::size_t base = 1 + nclocks_;
        const std::size_t entries = (len - base) / 2;
        const std::size_t drop = entries > keep ? entries - keep : 0;
        out.push_back(Word(len - 2 * drop));
        out.insert(out.end(), c, c + base);
        for (std::size_t i = base + 2 * drop; i < len; i += 2) {
            out.push_back(c[i]);
            out.push_back(poppable_[c[i]] ? c[i + 1] : Word(0));
        }
    }

    static Word *emit(Batch &out, const Ticks &c, std::size_t len) {
        out.push_back(Word(len));
        const auto at = out.size();
        out.insert(out.end(), c.begin(), c.begin() + std::min(len, c.size()));
        out.resize(at + len);
        return out.data() + at;
    }

    void discrete(const Ticks &c, Batch &out) const {
        const auto state = std::uint32_t(c[0]);
        const std::size_t len = c.size();
        const bool has_top = len > 1 + nclocks_;
        for (auto idx : t_.rules_from(state)) {
            const auto &r = t_.rules()[idx];
            const auto &ok = allowed_[idx];
            const auto dst = Word(r.dst);
            switch (r.kind) {
            case TpdaOp::Kind::Nop:
                emit(out, c, len)[0] = dst;
                break;
            case TpdaOp::Kind::Test:
                if (ok[c[1 + r.target]])
                    emit(out, c, len)[0] = dst;
                break;
            case TpdaOp::Kind::Reset:
                for (std::uint64_t v = 0; v <= cap_; ++v)
                    if (ok[v]) {
                        Word *w = emit(out, c, len);
                        w[0] = dst;
                        w[1 + r.target] = Word(v);
                    }
                break;
            case TpdaOp::Kind::Push:
                for (std::uint64_t v = 0; v <= cap_; ++v)
                    if (ok[v]) {
                        Word *w = emit(out, c, len + 2);
                        w[0] = dst;
                        w[len] = Word(r.target);
                        w[len + 1] = Word(v);
                    }
                break;
            case TpdaOp::Kind::Pop:
                if (has_top && c[len - 2] == r.target && ok[c[len - 1]])
                    emit(out, c, len - 2)[0] = dst;
                break;
            }
        }
    }

    const IndexedTpda &t_;
    std::size_t nclocks_;
    std::uint64_t cap_;
    std::vector<std::vector<char>> allowed_;
    std::vector<char> poppable_;
};

// Set of configurations stored back to back in one arena, indexed by an
// open-addressing table of arena offsets.
class ConfigStore {
public:
    ConfigStore() : table_(1024, kEmpty) {}

    std::size_t size() const { return starts_.size(); }
    const Word *data(std::uint32_t id) const { return arena_.data() + starts_[id] + 1; }
    std::size_t length(std::uint32_t id) const { return arena_[starts_[id]]; }

    // Id of the newly stored configuration, or nullopt when already present.
    std::optional<std::uint32_t> insert(const Word *c, std::size_t len) {
        if ((starts_.size() + 1) * 2 > table_.size())
            grow();
        const std::size_t h = hash(c, len);
        for (std::size_t slot = h & (table_.size() - 1);; slot = (slot + 1) & (table_.size() - 1)) {
            const std::uint32_t id = table_[slot];
            if (id == kEmpty) {
                const auto fresh = std::uint32_t(starts_.size());
                starts_.push_back(arena_.size());
                arena_.push_back(Word(len));
                arena_.insert(arena_.end(), c, c + len);
                table_[slot] = fresh;
                return fresh;
            }
            if (length(id) == len && std::equal(c, c + len, data(id)))
                return std::nullopt;
        }
    }

private:
    static constexpr std::uint32_t kEmpty = 0xffffffffu;

    static std::size_t hash(const Word *c, std::size_t len) {
        std::uint64_t h = 0xcbf29ce484222325ull ^ len;
        for (std::size_t i = 0; i < len; ++i)
            h = (h ^ c[i]) * 0x100000001b3ull;
        return std::size_t(h ^ (h >> 31));
    }

    void grow() {
        std::vector<std::uint32_t> bigger(table_.size() * 2, kEmpty);
        for (std::uint32_t id = 0; id < starts_.size(); ++id) {
            std::size_t slot = hash(data(id), length(id)) & (bigger.size() - 1);
            while (bigger[slot] != kEmpty)
                slot = (slot + 1) & (bigger.size() - 1);
            bigger[slot] = id;
        }
        table_ = std::move(bigger);
    }

    std::vector<Word> arena_;
    std::vector<std::size_t> starts_;
    std::vector<std::uint32_t> table_;
};

} // namespace

std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, const GridOracleOptions &opts, GridOracleStats &stats) {
    check_options(opts);
    stats = {};
    const TickKernel kernel(t, opts.denominator);

    std::set<std::uint32_t> states{t.init()};
    ConfigStore seen;
    const Ticks init = kernel.initial();
    std::vector<std::uint32_t> frontier{*seen.insert(init.data(), init.size())};

    for (std::size_t depth = 0; depth < opts.max_steps && !frontier.empty(); ++depth) {
        if (finished(states, t, opts)) {
            stats.stopped_early = true;
            break;
        }
        // Chunked so that successors never pile up for the whole frontier;
        // merged in frontier order so the next frontier is deterministic.
        std::vector<std::uint32_t> next;
        std::vector<Batch> produced(kChunk);
        for (std::size_t base = 0; base < frontier.size(); base += kChunk) {
            const auto n = static_cast<std::int64_t>(std::min(kChunk, frontier.size() - base));
            const bool last = depth + 1 == opts.max_steps;
#pragma omp parallel for schedule(dynamic, 16)
            for (std::int64_t i = 0; i < n; ++i) {
                const auto id = frontier[base + i];
                if (last)
                    kernel.targets(seen.data(id), seen.length(id), produced[i]);
                else
                    kernel.expand(seen.data(id), seen.length(id), opts.max_steps - depth - 1, produced[i]);
            }
            for (std::int64_t i = 0; i < n; ++i) {
                if (last) {
                    states.insert(produced[i].begin(), produced[i].end());
                    produced[i].clear();
                    continue;
                }
                const Batch &b = produced[i];
                for (std::size_t at = 0; at < b.size(); at += 1 + b[at])
                    if (auto id = seen.insert(b.data() + at + 1, b[at])) {
                        states.insert(std::uint32_t(b[at + 1]));
                        next.push_back(*id);
                    }
                produced[i].clear();
            }
        }
        frontier = std::move(next);
        stats.depth_reached = depth + 1;
    }
    if (!stats.stopped_early && finished(states, t, opts))
        stats.stopped_early = true;
    stats.configurations = seen.size();
    return states;
}

std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, const GridOracleOptions &opts) {
    GridOracleStats stats;
    return grid_oracle(t, opts, stats);
}

std::set<std::uint32_t> grid_oracle(const IndexedTpda &t, std::size_t max_steps, std::uint32_t denominator) {
    return grid_oracle(t, GridOracleOptions{max_steps, denominator, std::nullopt});
}

std::set<std::uint32_t> grid_oracle_serial(const IndexedTpda &t, const GridOracleOptions &opts) {
    check_options(opts);
    const Rational cap(static_cast<std::int64_t>(t.cmax()) + 1);
    auto capped = [&cap](TpdaConfig c) {
        for (auto &v : c.clocks)
            v = std::min(v, cap);
        for (auto &e : c.stack)
            e.age = std::min(e.age, cap);
        return c;
    };

    std::set<std::uint32_t> states{t.init()};
    std::set<TpdaConfig> seen{initial_config(t)};
    std::vector<TpdaConfig> frontier{initial_config(t)};
    const auto max_delay = static_cast<std::int64_t>(t.cmax() + 1) * opts.denominator;

    for (std::size_t depth = 0; depth < opts.max_steps && !frontier.empty(); ++depth) {
        if (finished(states, t, opts))
            break;
        std::vector<TpdaConfig> next;
        for (const auto &c : frontier) {
            for (std::int64_t k = 0; k <= max_delay; ++k) {
                const TpdaConfig delayed = k == 0 ? c : timed_step(c, Rational(k, opts.denominator));
                for (const auto &succ : discrete_step(t, delayed, opts.denominator)) {
                    auto key = capped(succ);
                    if (seen.insert(key).second) {
                        states.insert(key.state);
                        next.push_back(std::move(key));
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return states;
}

} // namespace tpdareach::tpda

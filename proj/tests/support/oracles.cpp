#include "support/oracles.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace tpdareach::testing {

using regions::Item;
using regions::ItemValuation;
using regions::Region;

std::int64_t representative_denominator(const Region &r) {
    return 2 * static_cast<std::int64_t>(r.sets().size());
}

ItemValuation representative(const Region &r) {
    const auto den = representative_denominator(r);
    ItemValuation v;
    for (std::size_t i = 0; i < r.sets().size(); ++i)
        for (const auto &e : r.sets()[i]) {
            const std::int64_t whole = e.val.is_omega() ? r.cmax() + 1 : e.val.value();
            v[e.item] = Rational(whole) + Rational(2 * static_cast<std::int64_t>(i), den);
        }
    return v;
}

namespace {

// Delays at which region_of(v + d) can change, with midpoints, ascending.
std::vector<Rational> critical_delays(const ItemValuation &v, std::uint32_t cmax, bool pin_ref) {
    const Item ref = Item::ref();
    std::set<Rational> fractions{Rational(0)};
    for (const auto &[it, x] : v)
        if (!pin_ref || it != ref)
            fractions.insert(x - Rational(boost::rational_cast<std::int64_t>(x)));
    // Event delays: every point where some item reaches an integer.
    std::set<Rational> events;
    const std::int64_t horizon = cmax + 3;
    for (std::int64_t k = 0; k <= horizon; ++k)
        for (const auto &f : fractions) {
            const Rational d = Rational(k) + (f == Rational(0) ? Rational(0) : Rational(1) - f);
            if (d <= horizon)
                events.insert(d);
        }
    std::vector<Rational> pts(events.begin(), events.end());
    std::vector<Rational> delays;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        delays.push_back(pts[i]);
        if (i + 1 < pts.size())
            delays.push_back((pts[i] + pts[i + 1]) / 2);
    }
    return delays;
}

Region shifted(const ItemValuation &v, const Rational &d, std::uint32_t cmax, bool pin_ref) {
    ItemValuation w;
    for (const auto &[it, x] : v)
        w[it] = pin_ref && it == Item::ref() ? x : x + d;
    return regions::region_of(w, cmax);
}

} // namespace

std::set<Region> trajectory_regions(const ItemValuation &v, std::uint32_t cmax) {
    std::set<Region> out;
    for (const auto &d : critical_delays(v, cmax, true))
        out.insert(shifted(v, d, cmax, true));
    return out;
}

Region next_region(const ItemValuation &v, std::uint32_t cmax, bool pin_ref) {
    const auto here = regions::region_of(v, cmax);
    for (const auto &d : critical_delays(v, cmax, pin_ref)) {
        auto r = shifted(v, d, cmax, pin_ref);
        if (r != here)
            return r;
    }
    return here;
}

std::vector<Region> all_regions(const std::vector<Item> &items, std::uint32_t cmax) {
    const std::size_t n = items.size();
    const std::uint32_t nvals = cmax + 2; // 0..cmax and omega
    std::vector<Region> out;
    std::vector<std::size_t> block(n, 0);
    std::vector<std::uint32_t> val(n, 0);
    // Blocks: each item picks 0..n; nonzero blocks in use must be 1..m.
    for (;;) {
        std::size_t m = 0;
        std::vector<bool> used(n + 1, false);
        for (auto b : block) {
            used[b] = true;
            m = std::max(m, b);
        }
        bool contiguous = true;
        for (std::size_t b = 1; b <= m; ++b)
            contiguous = contiguous && used[b];
        if (contiguous) {
            std::fill(val.begin(), val.end(), 0);
            for (;;) {
                std::vector<regions::ItemSet> sets(m + 1);
                for (std::size_t i = 0; i < n; ++i)
                    sets[block[i]].push_back(
                        {items[i], val[i] == cmax + 1 ? regions::Val::omega() : regions::Val::of(val[i])});
                out.emplace_back(std::move(sets), cmax);
                std::size_t i = 0;
                while (i < n && ++val[i] == nvals)
                    val[i++] = 0;
                if (i == n)
                    break;
            }
        }
        std::size_t i = 0;
        while (i < n && ++block[i] == n + 1)
            block[i++] = 0;
        if (i == n)
            break;
    }
    return out;
}

std::set<Region> brute_force_reset(const Region &r, const Item &it, const Interval &iv) {
    auto v = representative(r);
    v.erase(it);
    const auto den = representative_denominator(r) * 2;
    std::set<Region> out;
    for (std::int64_t whole = 0; whole <= static_cast<std::int64_t>(r.cmax()) + 1; ++whole)
        for (std::int64_t k = 0; k < den; ++k) {
            const Rational x = Rational(whole) + Rational(k, den);
            if (!iv.contains(x))
                continue;
            auto w = v;
            w[it] = x;
            out.insert(regions::region_of(w, r.cmax()));
        }
    return out;
}

std::set<std::string> region_graph_reachable(const tpda::Tpda &model) {
    const tpda::IndexedTpda t(model);
    if (t.num_symbols() != 0)
        for (const auto &r : t.rules())
            if (r.kind == tpda::TpdaOp::Kind::Push || r.kind == tpda::TpdaOp::Kind::Pop)
                throw std::invalid_argument("region_graph_reachable: stack operations present");
    const auto cmax = t.cmax();

    ItemValuation v0{{Item::ref(), Rational(0)}};
    for (std::uint16_t c = 0; c < t.num_clocks(); ++c)
        v0[Item::clock(c)] = 0;

    using Node = std::pair<std::uint32_t, Region>;
    std::set<Node> seen;
    std::deque<Node> work;
    auto visit = [&](std::uint32_t s, const Region &r) {
        if (seen.insert({s, r}).second)
            work.push_back({s, r});
    };
    visit(t.init(), regions::region_of(v0, cmax));

    while (!work.empty()) {
        const auto [s, r] = work.front();
        work.pop_front();
        for (const auto &later : trajectory_regions(representative(r), cmax))
            visit(s, later);
        const auto v = representative(r);
        for (auto idx : t.rules_from(s)) {
            const auto &rule = t.rules()[idx];
            switch (rule.kind) {
            case tpda::TpdaOp::Kind::Nop:
                visit(rule.dst, r);
                break;
            case tpda::TpdaOp::Kind::Test:
                if (rule.interval.contains(v.at(Item::clock(rule.target))))
                    visit(rule.dst, r);
                break;
            case tpda::TpdaOp::Kind::Reset:
                for (const auto &next : brute_force_reset(r, Item::clock(rule.target), rule.interval))
                    visit(rule.dst, next);
                break;
            default:
                break;
            }
        }
    }
    std::set<std::string> names;
    for (const auto &[s, r] : seen)
        names.insert(t.state_name(s));
    return names;
}

} // namespace tpdareach::testing

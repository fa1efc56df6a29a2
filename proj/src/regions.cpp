#include "tpdareach/regions.hpp"

#include "tpdareach/errors.hpp"
#include "tpdareach/tpda.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace tpdareach::regions {

namespace {

std::string describe(const Item &it) { return ItemNames{}.name(it); }

// Floor of a nonnegative rational.
std::int64_t floor_of(const Rational &v) { return v.numerator() / v.denominator(); }

} // namespace

// ---------------------------------------------------------------------------
// Region

Region::Region(std::vector<ItemSet> sets, std::uint32_t cmax) : cmax_(cmax), sets_(std::move(sets)) {
    if (sets_.empty())
        sets_.emplace_back();
    for (std::size_t i = 1; i < sets_.size(); ++i)
        if (sets_[i].empty())
            throw DomainError("region set " + std::to_string(i) + " is empty; only set 0 may be");
    // Omega items carry no fractional information: they live in set 0.
    for (std::size_t i = 1; i < sets_.size(); ++i)
        for (auto &e : sets_[i])
            if (e.val.is_omega())
                sets_[0].push_back(e);
    for (std::size_t i = 1; i < sets_.size(); ++i)
        std::erase_if(sets_[i], [](const Entry &e) { return e.val.is_omega(); });
    sets_.erase(std::remove_if(sets_.begin() + 1, sets_.end(), [](const ItemSet &s) { return s.empty(); }),
                sets_.end());
    std::vector<Item> seen;
    for (auto &s : sets_) {
        std::sort(s.begin(), s.end());
        for (const auto &e : s) {
            seen.push_back(e.item);
            if (!e.val.is_omega() && e.val.value() > cmax_)
                throw DomainError("value " + std::to_string(e.val.value()) + " of " + describe(e.item) +
                                  " exceeds c_max " + std::to_string(cmax_));
        }
    }
    std::sort(seen.begin(), seen.end());
    if (auto dup = std::adjacent_find(seen.begin(), seen.end()); dup != seen.end())
        throw DomainError("item " + describe(*dup) + " occurs twice in a region");
}

Region Region::normalized(std::vector<ItemSet> sets, std::uint32_t cmax) {
    if (sets.empty())
        sets.emplace_back();
    std::vector<ItemSet> kept;
    kept.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (i == 0 || !sets[i].empty())
            kept.push_back(std::move(sets[i]));
    return Region(std::move(kept), cmax);
}

std::size_t Region::item_count() const {
    std::size_t n = 0;
    for (const auto &s : sets_)
        n += s.size();
    return n;
}

std::optional<Position> Region::find(const Item &it) const {
    for (std::size_t i = 0; i < sets_.size(); ++i)
        for (const auto &e : sets_[i])
            if (e.item == it)
                return Position{i, e.val};
    return std::nullopt;
}

std::vector<Item> Region::items() const {
    std::vector<Item> out;
    for (const auto &s : sets_)
        for (const auto &e : s)
            out.push_back(e.item);
    std::sort(out.begin(), out.end());
    return out;
}

Shape Region::shape() const {
    std::size_t plain_syms = 0, shadow_syms = 0;
    bool plain_ref = false, shadow_ref = false;
    std::vector<std::uint16_t> plain_clocks, shadow_clocks;
    for (const auto &it : items()) {
        switch (it.kind) {
        case ItemKind::Ref:
            (it.is_shadow() ? shadow_ref : plain_ref) = true;
            break;
        case ItemKind::Clock:
            (it.is_shadow() ? shadow_clocks : plain_clocks).push_back(it.id);
            break;
        case ItemKind::Sym:
            ++(it.is_shadow() ? shadow_syms : plain_syms);
            break;
        }
    }
    if (!plain_ref)
        return Shape::Other;
    if (plain_syms == 0 && shadow_syms == 0 && !shadow_ref && shadow_clocks.empty())
        return Shape::Bottom;
    if (plain_syms == 1 && shadow_ref && shadow_syms <= 1 && shadow_clocks == plain_clocks)
        return Shape::Stack;
    return Shape::Other;
}

std::optional<Item> Region::plain_symbol() const {
    for (const auto &s : sets_)
        for (const auto &e : s)
            if (e.item.kind == ItemKind::Sym && !e.item.is_shadow())
                return e.item;
    return std::nullopt;
}

std::size_t Region::hash() const {
    std::size_t h = cmax_;
    for (const auto &s : sets_) {
        boost::hash_combine(h, s.size());
        for (const auto &e : s) {
            const std::uint64_t packed = (std::uint64_t(e.item.flavor) << 56) | (std::uint64_t(e.item.kind) << 48) |
                                         (std::uint64_t(e.item.id) << 32) |
                                         static_cast<std::uint32_t>(e.val.is_omega() ? 0xffffffffu : e.val.value());
            boost::hash_combine(h, packed);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Operations

std::uint32_t compute_cmax(const tpda::Tpda &t) {
    std::uint32_t m = 0;
    for (const auto &r : t.rules) {
        if (r.op.kind == tpda::TpdaOp::Kind::Nop)
            continue;
        m = std::max(m, r.op.interval.lo);
        if (r.op.interval.hi)
            m = std::max(m, *r.op.interval.hi);
    }
    return m;
}

Region region_of(const ItemValuation &v, std::uint32_t cmax) {
    ItemSet zero;
    std::map<Rational, ItemSet> by_fraction;
    for (const auto &[it, value] : v) {
        if (value < Rational(0))
            throw DomainError("negative value for " + describe(it));
        const auto whole = floor_of(value);
        const Rational frac = value - Rational(whole);
        const Val val = whole > static_cast<std::int64_t>(cmax) ? Val::omega() : Val::of(static_cast<std::uint32_t>(whole));
        if (frac == Rational(0))
            zero.push_back({it, val});
        else
            by_fraction[frac].push_back({it, val});
    }
    std::vector<ItemSet> sets{std::move(zero)};
    for (auto &[frac, s] : by_fraction)
        sets.push_back(std::move(s));
    return Region(std::move(sets), cmax);
}

Region rotate(const Region &r, bool move_ref) {
    const Item ref = Item::ref();
    if (!move_ref && !r.contains(ref))
        throw DomainError("cannot pin the reference item: region has none");
    auto movable = [&](const Entry &e) { return !e.val.is_omega() && (move_ref || e.item != ref); };

    std::vector<ItemSet> sets = r.sets();
    ItemSet stay, leave;
    for (const auto &e : sets[0])
        (movable(e) ? leave : stay).push_back(e);

    if (!leave.empty()) {
        // Zero-fraction items gain the smallest positive fraction.
        sets[0] = std::move(stay);
        sets.insert(sets.begin() + 1, std::move(leave));
        return Region(std::move(sets), r.cmax());
    }
    if (sets.size() == 1)
        return r; // nothing can move
    // The largest fraction reaches the next integer.
    ItemSet last = std::move(sets.back());
    sets.pop_back();
    for (auto &e : last) {
        e.val = e.val.next(r.cmax());
        sets[0].push_back(e);
    }
    return Region(std::move(sets), r.cmax());
}

std::vector<Region> time_successors(const Region &r) {
    std::vector<Region> out{r};
    std::unordered_set<Region, RegionHash> seen{r};
    for (;;) {
        Region next = rotate(out.back(), false);
        if (!seen.insert(next).second)
            return out;
        out.push_back(std::move(next));
    }
}

bool value_satisfies(Val v, bool zero_fraction, const Interval &iv, std::uint32_t cmax) {
    if (v.is_omega())
        return iv.unbounded() && iv.lo <= cmax;
    const Rational n(static_cast<std::int64_t>(v.value()));
    if (zero_fraction)
        return iv.contains(n);
    // Open unit interval (n, n+1).
    if (iv.lo > v.value())
        return false;
    return iv.unbounded() || *iv.hi >= v.value() + 1;
}

bool satisfies(const Region &r, const Item &it, const Interval &iv) {
    const auto pos = r.find(it);
    if (!pos)
        throw DomainError("item " + describe(it) + " does not occur in the region");
    return value_satisfies(pos->val, pos->zero_fraction(), iv, r.cmax());
}

std::set<Region> place_item(const Region &base, const Item &it, const Interval &iv) {
    if (!iv.well_formed())
        throw DomainError("empty interval " + iv.to_string());
    if (base.contains(it))
        throw DomainError("item " + describe(it) + " is already placed");

    std::vector<Val> values;
    for (std::uint32_t v = 0; v <= base.cmax(); ++v)
        values.push_back(Val::of(v));
    values.push_back(Val::omega());

    std::set<Region> out;
    const auto &sets = base.sets();
    for (const auto val : values) {
        // Join an existing set.
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!value_satisfies(val, i == 0, iv, base.cmax()))
                continue;
            auto copy = sets;
            copy[i].push_back({it, val});
            out.insert(Region(std::move(copy), base.cmax()));
        }
        // New singleton set with a fraction distinct from all others.
        if (!value_satisfies(val, false, iv, base.cmax()))
            continue;
        for (std::size_t gap = 1; gap <= sets.size(); ++gap) {
            auto copy = sets;
            copy.insert(copy.begin() + static_cast<std::ptrdiff_t>(gap), ItemSet{{it, val}});
            out.insert(Region(std::move(copy), base.cmax()));
        }
    }
    return out;
}

Region remove_item(const Region &r, const Item &it) {
    std::vector<ItemSet> sets = r.sets();
    for (auto &s : sets)
        std::erase_if(s, [&](const Entry &e) { return e.item == it; });
    return Region::normalized(std::move(sets), r.cmax());
}

std::set<Region> reset_insert(const Region &r, const Item &it, const Interval &iv) {
    if (!iv.well_formed())
        throw DomainError("empty interval " + iv.to_string());
    if (!r.contains(it))
        throw DomainError("item " + describe(it) + " does not occur in the region");
    return place_item(remove_item(r, it), it, iv);
}

Region project(const Region &r, const std::function<std::optional<Item>(const Item &)> &keep_as) {
    std::vector<ItemSet> sets;
    for (const auto &s : r.sets()) {
        ItemSet kept;
        for (const auto &e : s)
            if (auto renamed = keep_as(e.item))
                kept.push_back({*renamed, e.val});
        sets.push_back(std::move(kept));
    }
    return Region::normalized(std::move(sets), r.cmax());
}

// ---------------------------------------------------------------------------
// Text form

std::string ItemNames::name(const Item &it) const {
    std::string base;
    switch (it.kind) {
    case ItemKind::Ref:
        base = "R";
        break;
    case ItemKind::Clock:
        base = it.id < clocks.size() ? clocks[it.id] : "x" + std::to_string(it.id);
        break;
    case ItemKind::Sym:
        base = it.id < symbols.size() ? symbols[it.id] : "a" + std::to_string(it.id);
        break;
    }
    return it.is_shadow() ? base + "." : base;
}

std::string render(const Region &r, const ItemNames &names) {
    std::string out;
    for (std::size_t i = 0; i < r.sets().size(); ++i) {
        if (i > 0)
            out += " < ";
        out += "{";
        const auto &s = r.sets()[i];
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j > 0)
                out += ", ";
            out += names.name(s[j].item) + ":";
            out += s[j].val.is_omega() ? std::string("w") : std::to_string(s[j].val.value());
        }
        out += "}";
    }
    return out;
}

ParsedRegion parse_region(std::string_view text, std::optional<std::uint32_t> cmax) {
    std::size_t pos = 0;
    auto fail = [&](const std::string &msg) -> DomainError {
        return DomainError("region text, column " + std::to_string(pos + 1) + ": " + msg);
    };
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto expect = [&](char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw fail(std::string("expected '") + c + "'");
        ++pos;
    };

    ItemNames names;
    std::unordered_map<std::string, std::uint16_t> clock_ids;
    std::vector<ItemSet> sets;
    std::uint32_t largest = 0;

    for (;;) {
        expect('{');
        ItemSet set;
        skip_ws();
        if (pos < text.size() && text[pos] == '}') {
            ++pos;
        } else {
            for (;;) {
                skip_ws();
                const auto start = pos;
                while (pos < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                    ++pos;
                if (pos == start)
                    throw fail("expected an item name");
                std::string name(text.substr(start, pos - start));
                bool shadow = false;
                if (pos < text.size() && text[pos] == '.') {
                    shadow = true;
                    ++pos;
                }
                expect(':');
                skip_ws();
                Val val;
                if (text.substr(pos, 1) == "w") {
                    val = Val::omega();
                    ++pos;
                } else if (text.substr(pos, 2) == "\xcf\x89") { // UTF-8 omega
                    val = Val::omega();
                    pos += 2;
                } else {
                    const auto digits = pos;
                    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                        ++pos;
                    if (pos == digits)
                        throw fail("expected a value");
                    const auto v = static_cast<std::uint32_t>(std::stoul(std::string(text.substr(digits, pos - digits))));
                    largest = std::max(largest, v);
                    val = Val::of(v);
                }
                Item it = Item::ref();
                if (name != "R") {
                    auto [found, fresh] = clock_ids.try_emplace(name, static_cast<std::uint16_t>(names.clocks.size()));
                    if (fresh)
                        names.clocks.push_back(name);
                    it = Item::clock(found->second);
                }
                set.push_back({shadow ? it.shadow() : it, val});
                skip_ws();
                if (pos < text.size() && text[pos] == ',') {
                    ++pos;
                    continue;
                }
                expect('}');
                break;
            }
        }
        sets.push_back(std::move(set));
        skip_ws();
        if (pos >= text.size())
            break;
        expect('<');
    }
    const auto bound = cmax.value_or(largest);
    return ParsedRegion{Region(std::move(sets), bound), std::move(names)};
}

} // namespace tpdareach::regions

#pragma once

// Region calculus over plain and shadow items.
//
// A region is a sequence of sets of (item, value) pairs. Set 0 holds the items
// whose fractional part is zero; the remaining sets are ordered by increasing
// fractional part and are never empty. Values are integral parts capped by
// omega above c_max. Omega items always sit in set 0 and never rotate.

#include "tpdareach/interval.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tpdareach::tpda {
struct Tpda;
}

namespace tpdareach::regions {

enum class ItemKind : std::uint8_t { Ref, Clock, Sym };
enum class Flavor : std::uint8_t { Plain, Shadow };

struct Item {
    Flavor flavor = Flavor::Plain;
    ItemKind kind = ItemKind::Ref;
    std::uint16_t id = 0; // clock or symbol index; 0 for Ref

    static Item ref() { return {Flavor::Plain, ItemKind::Ref, 0}; }
    static Item clock(std::uint16_t c) { return {Flavor::Plain, ItemKind::Clock, c}; }
    static Item sym(std::uint16_t a) { return {Flavor::Plain, ItemKind::Sym, a}; }

    Item shadow() const { return {Flavor::Shadow, kind, id}; }
    Item plain() const { return {Flavor::Plain, kind, id}; }
    bool is_shadow() const { return flavor == Flavor::Shadow; }

    // Plain items first, then by kind (Ref, clocks, symbols), then id.
    friend auto operator<=>(const Item &, const Item &) = default;
};

// Integral value in [0, c_max], or omega.
class Val {
public:
    constexpr Val() = default;
    static constexpr Val of(std::uint32_t v) { return Val(static_cast<std::int32_t>(v)); }
    static constexpr Val omega() { return Val(kOmega); }

    constexpr bool is_omega() const { return raw_ == kOmega; }
    constexpr std::uint32_t value() const { return static_cast<std::uint32_t>(raw_); }

    // Value after reaching the next integer.
    constexpr Val next(std::uint32_t cmax) const {
        if (is_omega() || value() + 1 > cmax)
            return omega();
        return of(value() + 1);
    }

    friend constexpr auto operator<=>(const Val &, const Val &) = default;

private:
    static constexpr std::int32_t kOmega = INT32_MAX;
    constexpr explicit Val(std::int32_t raw) : raw_(raw) {}
    std::int32_t raw_ = 0;
};

struct Entry {
    Item item;
    Val val;
    friend auto operator<=>(const Entry &, const Entry &) = default;
};

using ItemSet = std::vector<Entry>;

enum class Shape : std::uint8_t { Bottom, Stack, Other };

// Where an item sits: set index and integral value.
struct Position {
    std::size_t set = 0;
    Val val;
    bool zero_fraction() const { return set == 0; }
    friend auto operator<=>(const Position &, const Position &) = default;
};

class Region {
public:
    // Moves omega items to set 0, sorts each set into canonical order and
    // checks the structural invariants; throws DomainError when they fail.
    Region(std::vector<ItemSet> sets, std::uint32_t cmax);

    // Like the constructor but first drops empty sets after set 0.
    static Region normalized(std::vector<ItemSet> sets, std::uint32_t cmax);

    const std::vector<ItemSet> &sets() const { return sets_; }
    std::uint32_t cmax() const { return cmax_; }
    std::size_t item_count() const;

    std::optional<Position> find(const Item &it) const;
    bool contains(const Item &it) const { return find(it).has_value(); }
    std::vector<Item> items() const;

    Shape shape() const;
    // Plain stack symbol of a Stack region.
    std::optional<Item> plain_symbol() const;

    std::size_t hash() const;

    friend bool operator==(const Region &, const Region &) = default;
    friend auto operator<=>(const Region &, const Region &) = default;

private:
    std::uint32_t cmax_ = 0;
    std::vector<ItemSet> sets_;
};

struct RegionHash {
    std::size_t operator()(const Region &r) const { return r.hash(); }
};

using ItemValuation = std::map<Item, Rational>;

std::uint32_t compute_cmax(const tpda::Tpda &t);

// Abstraction of a concrete valuation. Negative values throw DomainError.
Region region_of(const ItemValuation &v, std::uint32_t cmax);

// One step of time passage. With move_ref false the plain reference item
// stays pinned in set 0 (and must be present).
Region rotate(const Region &r, bool move_ref);

// r, rotate(r), rotate^2(r), ... up to the first repetition (pinned reference).
std::vector<Region> time_successors(const Region &r);

// Every real consistent with the item's abstract value lies in `iv`.
bool satisfies(const Region &r, const Item &it, const Interval &iv);
bool value_satisfies(Val v, bool zero_fraction, const Interval &iv, std::uint32_t cmax);

// Every region obtained by adding `it` (absent from `base`) at any position
// and value satisfying `iv`.
std::set<Region> place_item(const Region &base, const Item &it, const Interval &iv);

// Removes `it` from `r`; empty sets after set 0 disappear.
Region remove_item(const Region &r, const Item &it);

// Reassign `it` to every value/position satisfying `iv`.
std::set<Region> reset_insert(const Region &r, const Item &it, const Interval &iv);

// Projection onto the items accepted by `keep`, renamed through `rename`.
// Set 0 is always kept; other sets that become empty disappear.
Region project(const Region &r, const std::function<std::optional<Item>(const Item &)> &keep_as);

// ---------------------------------------------------------------------------
// Text form: "{R:0, x:0} < {y:1} < {x.:3}" (shadows carry a trailing dot,
// omega prints as "w").

struct ItemNames {
    std::vector<std::string> clocks;
    std::vector<std::string> symbols;

    std::string name(const Item &it) const;
};

std::string render(const Region &r, const ItemNames &names = {});

struct ParsedRegion {
    Region region;
    ItemNames names;
};

// Names other than R are read as clocks, numbered by first appearance.
// When `cmax` is absent the largest finite value in the text is used.
ParsedRegion parse_region(std::string_view text, std::optional<std::uint32_t> cmax = std::nullopt);

} // namespace tpdareach::regions

template <>
struct std::hash<tpdareach::regions::Region> {
    std::size_t operator()(const tpdareach::regions::Region &r) const { return r.hash(); }
};

#pragma once

#include "tpdareach/regions.hpp"
#include "tpdareach/tpda.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace tpdareach::testing {

// Concrete valuation realising `r`: set i > 0 gets fraction i/(m+1) over
// `denominator` = 2(m+1) slots, omega items sit at c_max+1 plus that fraction.
regions::ItemValuation representative(const regions::Region &r);
std::int64_t representative_denominator(const regions::Region &r);

// Regions met by letting time pass from `v`, with the plain reference item
// (if present) held at 0. Computed from the valuation at every event point
// and midpoint.
std::set<regions::Region> trajectory_regions(const regions::ItemValuation &v, std::uint32_t cmax);

// First region different from region_of(v) met while time passes; the plain
// reference stays at its value when `pin_ref` is set. Returns region_of(v)
// when nothing can change.
regions::Region next_region(const regions::ItemValuation &v, std::uint32_t cmax, bool pin_ref);

// Every region over the given items with values in [0, cmax] or omega.
std::vector<regions::Region> all_regions(const std::vector<regions::Item> &items, std::uint32_t cmax);

// Regions obtained by giving `it` each concrete value in `iv` on a grid fine
// enough to hit every position relative to the representative of `r`.
// Exact when the endpoints of `iv` do not exceed c_max.
std::set<regions::Region> brute_force_reset(const regions::Region &r, const regions::Item &it, const Interval &iv);

// Reachable states of a stack-free TPDA by exploring regions through
// concrete representatives only (no rotate, satisfies or reset_insert).
std::set<std::string> region_graph_reachable(const tpda::Tpda &t);

} // namespace tpdareach::testing

#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace tpdareach {

using Rational = boost::rational<std::int64_t>;

// Interval with natural endpoints; an absent upper bound means infinity.
struct Interval {
    std::uint32_t lo = 0;
    bool lo_closed = true;
    std::optional<std::uint32_t> hi;
    bool hi_closed = false;

    static Interval closed(std::uint32_t lo, std::uint32_t hi) { return {lo, true, hi, true}; }
    static Interval point(std::uint32_t v) { return closed(v, v); }
    static Interval at_least(std::uint32_t lo) { return {lo, true, std::nullopt, false}; }
    static Interval greater_than(std::uint32_t lo) { return {lo, false, std::nullopt, false}; }
    static Interval any() { return at_least(0); }

    bool unbounded() const { return !hi.has_value(); }

    // Nonempty and "inf" only as an open upper bound.
    bool well_formed() const {
        if (!hi)
            return !hi_closed;
        if (lo < *hi)
            return true;
        return lo == *hi && lo_closed && hi_closed;
    }

    bool contains(const Rational &v) const {
        if (v < Rational(lo) || (!lo_closed && v == Rational(lo)))
            return false;
        if (!hi)
            return true;
        return v < Rational(*hi) || (hi_closed && v == Rational(*hi));
    }

    std::string to_string() const {
        std::string s = lo_closed ? "[" : "(";
        s += std::to_string(lo) + ":";
        s += hi ? std::to_string(*hi) : std::string("inf");
        s += hi_closed ? "]" : ")";
        return s;
    }

    friend bool operator==(const Interval &, const Interval &) = default;
};

} // namespace tpdareach

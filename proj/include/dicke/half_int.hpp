// half_int.hpp — Exact half-integer arithmetic for collective quantum numbers

#pragma once

#include <compare>
#include <cstddef>
#include <functional>

namespace dicke {

// Stores twice the value, so J = 7/2 has twice == 7 and J = 3 has twice == 6.
// Comparisons, parity checks and ladder steps stay in integer arithmetic;
// nothing here ever rounds.
struct HalfInt {
    int twice{0};

    static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
    static constexpr HalfInt whole(int k) { return HalfInt{2 * k}; }

    constexpr double value() const { return 0.5 * static_cast<double>(twice); }
    constexpr bool is_whole() const { return twice % 2 == 0; }

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }
    constexpr HalfInt operator-() const { return HalfInt{-twice}; }
    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
    friend constexpr bool operator==(HalfInt, HalfInt) = default;
};

// The ladder step 1/2 used throughout the collective index math.
inline constexpr HalfInt one_half{1};

} // namespace dicke

template <>
struct std::hash<dicke::HalfInt> {
    std::size_t operator()(const dicke::HalfInt& h) const noexcept {
        return std::hash<int>{}(h.twice);
    }
};

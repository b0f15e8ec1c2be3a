#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "error.hpp"

namespace sortnet
{

/// Maximum number of channels a network may have; one machine word per vector.
inline constexpr int max_channels = 64;

/// Binary word of width n. Channel i (1-based, channel 1 topmost) is bit i-1.
struct bit_vector
{
    std::uint64_t bits = 0;
    int width = 0;

    constexpr bit_vector() = default;
    constexpr bit_vector(std::uint64_t b, int w) : bits(b), width(w) {}

    constexpr bool operator[](int channel) const { return (bits >> (channel - 1)) & 1u; }

    constexpr void set(int channel, bool value)
    {
        auto const m = std::uint64_t{1} << (channel - 1);
        bits = value ? (bits | m) : (bits & ~m);
    }

    constexpr int count_ones() const { return std::popcount(bits); }

    friend constexpr bool operator==(bit_vector const&, bit_vector const&) = default;
    friend constexpr auto operator<=>(bit_vector const& x, bit_vector const& y)
    {
        if (auto c = x.width <=> y.width; c != 0) {
            return c;
        }
        return x.bits <=> y.bits;
    }
};

constexpr std::uint64_t width_mask(int width)
{
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

/// Sorted copy: all zeros on the top channels, ones below.
constexpr bit_vector sorted_copy(bit_vector x)
{
    auto const ones = x.count_ones();
    auto const zeros = x.width - ones;
    return {width_mask(x.width) & ~width_mask(zeros), x.width};
}

/// True iff x = 0^a 1^b.
constexpr bool is_sorted(bit_vector x)
{
    return x == sorted_copy(x);
}

/// Window of a vector 0^a x' 1^b with a and b maximal.
struct window
{
    int a = 0;
    int b = 0;
    int size = 0;

    friend constexpr bool operator==(window const&, window const&) = default;
};

/// All-zero vectors report (a = n, b = 0), all-one vectors (a = 0, b = n); both have size 0.
constexpr window window_of(bit_vector x)
{
    int const n = x.width;
    auto const bits = x.bits & width_mask(n);
    if (bits == 0) {
        return {n, 0, 0};
    }
    if (bits == width_mask(n)) {
        return {0, n, 0};
    }
    int const a = std::countr_zero(bits);
    int const b = std::countl_one(bits << (64 - n));
    int const size = n - a - b;
    return {a, b, size > 0 ? size : 0};
}

/// Text form with channel 1 first, e.g. "0101".
inline std::string to_string(bit_vector x)
{
    std::string s(static_cast<std::size_t>(x.width), '0');
    for (int i = 1; i <= x.width; ++i) {
        if (x[i]) {
            s[static_cast<std::size_t>(i - 1)] = '1';
        }
    }
    return s;
}

inline bit_vector parse_bit_vector(std::string_view s)
{
    if (s.size() > static_cast<std::size_t>(max_channels)) {
        throw argument_error("bit vector wider than 64 channels");
    }
    bit_vector x{0, static_cast<int>(s.size())};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            x.set(static_cast<int>(i) + 1, true);
        } else if (s[i] != '0') {
            throw parse_error("bit vector may only contain '0' and '1': " + std::string(s));
        }
    }
    return x;
}

} // namespace sortnet

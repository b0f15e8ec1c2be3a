#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bit_vector.hpp"
#include "error.hpp"

namespace sortnet
{

/// Networks above this many channels are refused by exhaustive operations.
inline constexpr int default_exhaustive_limit = 24;

/// Comparator sending the minimum to channel `lo` and the maximum to channel `hi`.
/// A standard comparator has lo < hi; a twisted one (lo > hi) only appears
/// transiently after permuting channels.
struct comparator
{
    int lo = 0;
    int hi = 0;

    constexpr bool is_standard() const { return lo < hi; }
    constexpr int top() const { return lo < hi ? lo : hi; }
    constexpr int bottom() const { return lo < hi ? hi : lo; }

    friend constexpr bool operator==(comparator const&, comparator const&) = default;
    friend constexpr auto operator<=>(comparator const&, comparator const&) = default;
};

using layer = std::vector<comparator>;

class comparator_network
{
public:
    comparator_network() = default;

    explicit comparator_network(int channels) : channels_(channels)
    {
        if (channels < 0 || channels > max_channels) {
            throw argument_error("channel count must be in [0, 64], got " + std::to_string(channels));
        }
    }

    comparator_network(int channels, std::vector<layer> layers) : comparator_network(channels)
    {
        for (auto& l : layers) {
            add_layer(std::move(l));
        }
    }

    int channels() const { return channels_; }
    int depth() const { return static_cast<int>(layers_.size()); }
    std::vector<layer> const& layers() const { return layers_; }
    layer const& operator[](std::size_t k) const { return layers_[k]; }

    std::size_t size() const
    {
        std::size_t s = 0;
        for (auto const& l : layers_) {
            s += l.size();
        }
        return s;
    }

    bool is_standard() const
    {
        return std::all_of(layers_.begin(), layers_.end(), [](layer const& l) {
            return std::all_of(l.begin(), l.end(), [](comparator c) { return c.is_standard(); });
        });
    }

    /// Appends a layer after checking channel bounds and that no channel is used twice.
    void add_layer(layer l)
    {
        std::uint64_t used = 0;
        for (auto c : l) {
            if (c.lo < 1 || c.hi < 1 || c.lo > channels_ || c.hi > channels_) {
                throw argument_error("comparator (" + std::to_string(c.lo) + "," + std::to_string(c.hi) +
                                     ") outside channels 1.." + std::to_string(channels_));
            }
            if (c.lo == c.hi) {
                throw argument_error("comparator connects channel " + std::to_string(c.lo) + " to itself");
            }
            auto const m = (std::uint64_t{1} << (c.lo - 1)) | (std::uint64_t{1} << (c.hi - 1));
            if (used & m) {
                throw argument_error("layer " + std::to_string(layers_.size() + 1) + " uses a channel twice");
            }
            used |= m;
        }
        layers_.push_back(std::move(l));
    }

    /// Layers [first, last) as a network on the same channels.
    comparator_network slice(int first, int last) const
    {
        comparator_network out(channels_);
        for (int k = first; k < last; ++k) {
            out.layers_.push_back(layers_[static_cast<std::size_t>(k)]);
        }
        return out;
    }

    /// Comparators within each layer sorted by (top, bottom).
    comparator_network canonical() const
    {
        auto out = *this;
        for (auto& l : out.layers_) {
            std::sort(l.begin(), l.end(), [](comparator x, comparator y) {
                return std::pair(x.top(), x.bottom()) < std::pair(y.top(), y.bottom());
            });
        }
        return out;
    }

    friend bool operator==(comparator_network const&, comparator_network const&) = default;

private:
    int channels_ = 0;
    std::vector<layer> layers_;
};

/// Concatenation: the layers of `head` followed by the layers of `tail`.
inline comparator_network concat(comparator_network const& head, comparator_network const& tail)
{
    if (head.channels() != tail.channels()) {
        throw argument_error("cannot concatenate networks with different channel counts");
    }
    auto out = head;
    for (auto const& l : tail.layers()) {
        out.add_layer(l);
    }
    return out;
}

namespace detail
{

/// Flat list of 0-based (min end, max end) channel pairs in evaluation order.
inline std::vector<std::array<std::uint8_t, 2>> flatten(comparator_network const& net)
{
    std::vector<std::array<std::uint8_t, 2>> flat;
    flat.reserve(net.size());
    for (auto const& l : net.layers()) {
        for (auto c : l) {
            flat.push_back({static_cast<std::uint8_t>(c.lo - 1), static_cast<std::uint8_t>(c.hi - 1)});
        }
    }
    return flat;
}

inline std::uint64_t apply_flat(std::span<std::array<std::uint8_t, 2> const> flat, std::uint64_t x)
{
    for (auto [lo, hi] : flat) {
        auto const a = (x >> lo) & 1u;
        auto const b = (x >> hi) & 1u;
        // min on lo, max on hi: only 1-above-0 needs a swap.
        if (a > b) {
            x ^= (std::uint64_t{1} << lo) | (std::uint64_t{1} << hi);
        }
    }
    return x;
}

inline void check_exhaustive(int channels, int limit)
{
    if (channels > limit) {
        throw limit_error("exhaustive evaluation of " + std::to_string(channels) +
                          " channels exceeds the limit of " + std::to_string(limit));
    }
}

inline void require_standard(comparator_network const& net)
{
    if (!net.is_standard()) {
        throw argument_error("network contains a twisted comparator; untangle it first");
    }
}

/// Column words for 64 consecutive inputs starting at `base`: bit t of word c is
/// channel c+1 of input base+t.
inline void load_block(std::uint64_t base, int channels, std::span<std::uint64_t> words)
{
    static constexpr std::array<std::uint64_t, 6> patterns = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
    };
    for (int c = 0; c < channels; ++c) {
        words[static_cast<std::size_t>(c)] =
            c < 6 ? patterns[static_cast<std::size_t>(c)] : (((base >> c) & 1u) ? ~std::uint64_t{0} : 0);
    }
}

} // namespace detail

/// Works on twisted networks too (min always goes to the comparator's `lo` end).
inline bit_vector apply_generalized(comparator_network const& net, bit_vector input)
{
    if (input.width != net.channels()) {
        throw argument_error("input width " + std::to_string(input.width) + " does not match " +
                             std::to_string(net.channels()) + " channels");
    }
    for (auto const& l : net.layers()) {
        for (auto c : l) {
            bool const a = input[c.lo];
            bool const b = input[c.hi];
            input.set(c.lo, a && b);
            input.set(c.hi, a || b);
        }
    }
    return input;
}

inline bit_vector apply_network(comparator_network const& net, bit_vector input)
{
    detail::require_standard(net);
    return apply_generalized(net, input);
}

/// Applies the network to arbitrary totally ordered values with min/max.
template <typename T>
void apply_values(comparator_network const& net, std::span<T> values)
{
    if (values.size() != static_cast<std::size_t>(net.channels())) {
        throw argument_error("value count does not match channel count");
    }
    for (auto const& l : net.layers()) {
        for (auto c : l) {
            auto& x = values[static_cast<std::size_t>(c.lo - 1)];
            auto& y = values[static_cast<std::size_t>(c.hi - 1)];
            if (y < x) {
                std::swap(x, y);
            }
        }
    }
}

struct verdict
{
    bool sorting = true;
    std::optional<bit_vector> counterexample;
};

/// Exhaustive 0-1 check, 64 inputs per step. The counterexample is the
/// numerically smallest unsorted input.
inline verdict verify_sorting(comparator_network const& net, int limit = default_exhaustive_limit)
{
    int const n = net.channels();
    detail::check_exhaustive(n, limit);
    if (n <= 1) {
        return {};
    }
    auto const flat = detail::flatten(net);
    std::uint64_t const total = std::uint64_t{1} << n;
    std::uint64_t const valid = total >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << total) - 1);
    std::array<std::uint64_t, max_channels> w{};
    for (std::uint64_t base = 0; base < total; base += 64) {
        detail::load_block(base, n, w);
        for (auto [lo, hi] : flat) {
            auto const a = w[lo];
            auto const b = w[hi];
            w[lo] = a & b;
            w[hi] = a | b;
        }
        std::uint64_t bad = 0;
        for (int c = 0; c + 1 < n; ++c) {
            bad |= w[static_cast<std::size_t>(c)] & ~w[static_cast<std::size_t>(c) + 1];
        }
        bad &= valid;
        if (bad != 0) {
            return {false, bit_vector{base + static_cast<std::uint64_t>(std::countr_zero(bad)), n}};
        }
    }
    return {};
}

/// Distinct outputs over all 2^n inputs, ascending numerically.
inline std::vector<bit_vector> output_set(comparator_network const& net, int limit = default_exhaustive_limit)
{
    int const n = net.channels();
    detail::check_exhaustive(n, limit);
    detail::require_standard(net);
    auto const flat = detail::flatten(net);
    std::uint64_t const total = std::uint64_t{1} << n;
    std::vector<std::uint64_t> seen((total + 63) / 64, 0);
    for (std::uint64_t x = 0; x < total; ++x) {
        auto const y = detail::apply_flat(flat, x);
        seen[y >> 6] |= std::uint64_t{1} << (y & 63);
    }
    std::vector<bit_vector> out;
    for (std::size_t w = 0; w < seen.size(); ++w) {
        for (auto m = seen[w]; m != 0; m &= m - 1) {
            out.emplace_back((static_cast<std::uint64_t>(w) << 6) + static_cast<std::uint64_t>(std::countr_zero(m)), n);
        }
    }
    return out;
}

/// Sum of window sizes over the distinct outputs: the number of channels the
/// encoding must model when the network is used as a prefix.
inline std::uint64_t window_sum(comparator_network const& net, int limit = default_exhaustive_limit)
{
    std::uint64_t sum = 0;
    for (auto y : output_set(net, limit)) {
        sum += static_cast<std::uint64_t>(window_of(y).size);
    }
    return sum;
}

/// `perm[i-1]` is the new channel of channel i (values 1..n).
inline comparator_network permute_channels(comparator_network const& net, std::span<int const> perm)
{
    int const n = net.channels();
    if (perm.size() != static_cast<std::size_t>(n)) {
        throw argument_error("permutation length does not match channel count");
    }
    std::vector<bool> hit(static_cast<std::size_t>(n) + 1, false);
    for (int p : perm) {
        if (p < 1 || p > n || hit[static_cast<std::size_t>(p)]) {
            throw argument_error("not a permutation of 1.." + std::to_string(n));
        }
        hit[static_cast<std::size_t>(p)] = true;
    }
    comparator_network out(n);
    for (auto const& l : net.layers()) {
        layer mapped;
        mapped.reserve(l.size());
        for (auto c : l) {
            mapped.push_back({perm[static_cast<std::size_t>(c.lo - 1)], perm[static_cast<std::size_t>(c.hi - 1)]});
        }
        out.add_layer(std::move(mapped));
    }
    return out;
}

/// Repairs twisted comparators left to right: a twisted (a,b) becomes (b,a)
/// and channels a and b trade names in every later layer.
inline comparator_network untangle(comparator_network const& net)
{
    int const n = net.channels();
    std::vector<layer> layers = net.layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        for (std::size_t p = 0; p < layers[k].size(); ++p) {
            auto& c = layers[k][p];
            if (c.is_standard()) {
                continue;
            }
            int const a = c.lo;
            int const b = c.hi;
            c = {b, a};
            for (std::size_t later = k + 1; later < layers.size(); ++later) {
                for (auto& e : layers[later]) {
                    auto swap_name = [a, b](int ch) { return ch == a ? b : (ch == b ? a : ch); };
                    e = {swap_name(e.lo), swap_name(e.hi)};
                }
            }
        }
    }
    return comparator_network(n, std::move(layers));
}

inline std::vector<int> identity_permutation(int n)
{
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 1);
    return p;
}

} // namespace sortnet

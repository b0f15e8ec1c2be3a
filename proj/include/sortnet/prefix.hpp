#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "network.hpp"
#include "serialize.hpp"

namespace sortnet
{

/// Fixed head of a synthesis problem.
struct prefix
{
    comparator_network network;
    std::string label;

    int depth() const { return network.depth(); }
    int channels() const { return network.channels(); }

    friend bool operator==(prefix const&, prefix const&) = default;
};

inline nlohmann::json to_json(prefix const& p)
{
    auto j = to_json(p.network);
    j["label"] = p.label;
    return j;
}

inline prefix prefix_from_json(nlohmann::json const& j)
{
    prefix p{network_from_json(j), "user"};
    if (j.contains("label")) {
        if (!j.at("label").is_string()) {
            throw parse_error("\"label\" must be a string");
        }
        p.label = j.at("label").get<std::string>();
    }
    return p;
}

/// (1,2), (3,4), ...; the last channel stays free when n is odd.
inline prefix first_layer_pb(int n)
{
    if (n < 1) {
        throw argument_error("first layer needs at least one channel");
    }
    layer l;
    for (int i = 1; 2 * i <= n; ++i) {
        l.push_back({2 * i - 1, 2 * i});
    }
    comparator_network net(n);
    net.add_layer(std::move(l));
    return {std::move(net), "pb"};
}

/// (i, n+1-i) for 1 <= i <= n/2.
inline prefix first_layer_bz(int n)
{
    if (n < 1) {
        throw argument_error("first layer needs at least one channel");
    }
    layer l;
    for (int i = 1; 2 * i <= n; ++i) {
        l.push_back({i, n + 1 - i});
    }
    comparator_network net(n);
    net.add_layer(std::move(l));
    return {std::move(net), "bz"};
}

/// First `t` layers of the Green filter on n = 2^m channels. Layer k compares
/// channels at stride 2^(k-1) inside blocks of 2^k channels.
inline prefix green_filter(int n, int t)
{
    if (n < 2 || (n & (n - 1)) != 0 || n > max_channels) {
        throw argument_error("Green filter needs a power-of-two channel count, got " + std::to_string(n));
    }
    int const m = std::countr_zero(static_cast<unsigned>(n));
    if (t < 1 || t > m) {
        throw argument_error("Green filter on " + std::to_string(n) + " channels has 1.." + std::to_string(m) +
                             " layers, got " + std::to_string(t));
    }
    comparator_network net(n);
    for (int k = 1; k <= t; ++k) {
        int const stride = 1 << (k - 1);
        layer l;
        for (int i = 1; i + stride <= n; ++i) {
            if (((i - 1) & stride) == 0) {
                l.push_back({i, i + stride});
            }
        }
        net.add_layer(std::move(l));
    }
    return {std::move(net), "green"};
}

/// Same comparators on a wider network; the extra channels are appended at the bottom.
inline comparator_network widen(comparator_network const& net, int channels)
{
    if (channels < net.channels()) {
        throw argument_error("cannot narrow a network");
    }
    return comparator_network(channels, net.layers());
}

inline constexpr int default_enumeration_limit = 10;

namespace detail
{

inline void enumerate_matchings(int n, int next, std::uint64_t used, layer& cur, std::vector<layer>& out)
{
    while (next <= n && (used >> (next - 1)) & 1u) {
        ++next;
    }
    if (next > n) {
        out.push_back(cur);
        return;
    }
    auto const with_next = used | (std::uint64_t{1} << (next - 1));
    enumerate_matchings(n, next + 1, with_next, cur, out);
    for (int j = next + 1; j <= n; ++j) {
        if ((used >> (j - 1)) & 1u) {
            continue;
        }
        cur.push_back({next, j});
        enumerate_matchings(n, next + 1, with_next | (std::uint64_t{1} << (j - 1)), cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// Every set of disjoint comparators on n channels, including the empty one.
inline std::vector<layer> all_layers(int n)
{
    std::vector<layer> out;
    layer cur;
    detail::enumerate_matchings(n, 1, 0, cur, out);
    return out;
}

/// Two-layer prefixes over the BZ first layer, one representative per class.
///
/// Two prefixes are equivalent when one is untangle(permute(other, pi)) for a
/// channel permutation pi that maps the first layer onto itself. The
/// representative is the lexicographically smallest serialized form in the
/// class. Second layers repeating a first-layer comparator are dropped, since
/// that comparator never acts and the smaller layer is also enumerated.
inline std::vector<prefix> enumerate_two_layer_prefixes(int n, int limit = default_enumeration_limit)
{
    if (n < 1) {
        throw argument_error("enumeration needs at least one channel");
    }
    if (n > limit) {
        throw limit_error("two-layer enumeration for " + std::to_string(n) + " channels exceeds the limit of " +
                          std::to_string(limit));
    }
    auto const first = first_layer_bz(n).network[0];
    auto const pairs = static_cast<int>(first.size());

    // Generators of the stabilizer of the first layer: adjacent pair swaps
    // (keeping orientation) and flipping one pair.
    std::vector<std::vector<int>> generators;
    for (int p = 0; p + 1 < pairs; ++p) {
        auto g = identity_permutation(n);
        auto const a = first[static_cast<std::size_t>(p)];
        auto const b = first[static_cast<std::size_t>(p) + 1];
        g[static_cast<std::size_t>(a.lo - 1)] = b.lo;
        g[static_cast<std::size_t>(b.lo - 1)] = a.lo;
        g[static_cast<std::size_t>(a.hi - 1)] = b.hi;
        g[static_cast<std::size_t>(b.hi - 1)] = a.hi;
        generators.push_back(std::move(g));
    }
    if (pairs > 0) {
        auto g = identity_permutation(n);
        std::swap(g[static_cast<std::size_t>(first[0].lo - 1)], g[static_cast<std::size_t>(first[0].hi - 1)]);
        generators.push_back(std::move(g));
    }

    std::set<comparator> redundant(first.begin(), first.end());
    std::map<std::string, comparator_network> pending;
    for (auto& second : all_layers(n)) {
        if (std::any_of(second.begin(), second.end(), [&](comparator c) { return redundant.count(c) > 0; })) {
            continue;
        }
        comparator_network net(n, {first, second});
        pending.emplace(serialize(net), std::move(net));
    }

    std::vector<prefix> reps;
    std::set<std::string> seen;
    for (auto const& [key, net] : pending) {
        if (seen.count(key)) {
            continue;
        }
        // BFS over the orbit; `pending` iterates in lexicographic order, so
        // the first unseen key is the smallest element of its class.
        std::queue<comparator_network> todo;
        todo.push(net);
        seen.insert(key);
        while (!todo.empty()) {
            auto cur = std::move(todo.front());
            todo.pop();
            for (auto const& g : generators) {
                auto img = untangle(permute_channels(cur, g));
                auto k = serialize(img);
                if (seen.insert(k).second) {
                    todo.push(std::move(img));
                }
            }
        }
        reps.push_back({net.canonical(), "enumerated"});
    }
    return reps;
}

/// Parameters of the (mu + lambda) permutation search in optimize_prefix.
struct ea_config
{
    std::size_t sample_size = 800;
    std::size_t population = 20;
    std::size_t offspring = 40;
    std::size_t generations = 200;
    double mutation_rate = 0.3;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (sample_size < 1 || population < 1 || offspring < 1) {
            throw argument_error("EA sample size, population and offspring count must be positive");
        }
        if (!(mutation_rate >= 0.0 && mutation_rate < 1.0)) {
            throw argument_error("EA mutation rate must be in [0, 1)");
        }
    }
};

inline nlohmann::json to_json(ea_config const& c)
{
    return {{"sample_size", c.sample_size}, {"population", c.population},       {"offspring", c.offspring},
            {"generations", c.generations}, {"mutation_rate", c.mutation_rate}, {"seed", c.seed}};
}

/// Missing keys keep their defaults.
inline ea_config ea_config_from_json(nlohmann::json const& j)
{
    if (!j.is_object()) {
        throw parse_error("EA config must be a JSON object");
    }
    ea_config c;
    try {
        c.sample_size = j.value("sample_size", c.sample_size);
        c.population = j.value("population", c.population);
        c.offspring = j.value("offspring", c.offspring);
        c.generations = j.value("generations", c.generations);
        c.mutation_rate = j.value("mutation_rate", c.mutation_rate);
        c.seed = j.value("seed", c.seed);
    } catch (nlohmann::json::exception const& e) {
        throw parse_error(std::string("bad EA config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Window-size sum over the `sample_size` worst distinct outputs (largest
/// window first, ties by text form). With a large enough sample this is window_sum.
inline std::uint64_t prefix_fitness(comparator_network const& net, std::size_t sample_size,
                                    int limit = default_exhaustive_limit)
{
    auto outs = output_set(net, limit);
    if (sample_size >= outs.size()) {
        std::uint64_t sum = 0;
        for (auto y : outs) {
            sum += static_cast<std::uint64_t>(window_of(y).size);
        }
        return sum;
    }
    std::vector<std::pair<int, std::string>> keyed;
    keyed.reserve(outs.size());
    for (auto y : outs) {
        keyed.emplace_back(-window_of(y).size, to_string(y));
    }
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(sample_size), keyed.end());
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < sample_size; ++i) {
        sum += static_cast<std::uint64_t>(-keyed[i].first);
    }
    return sum;
}

namespace detail
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent stream per (generation, individual) so results do not depend on evaluation order.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(generation * 0x100000001B3ull + index)));
}

} // namespace detail

struct optimize_result
{
    prefix best;
    std::uint64_t initial_fitness = 0;
    std::uint64_t best_fitness = 0;
    std::vector<int> permutation;
};

/// Searches channel permutations pi minimizing the fitness of untangle(permute(p, pi)).
inline optimize_result optimize_prefix_detailed(prefix const& p, ea_config const& cfg)
{
    cfg.validate();
    detail::require_standard(p.network);
    int const n = p.channels();
    detail::check_exhaustive(n, default_exhaustive_limit);

    struct individual
    {
        std::vector<int> perm;
        comparator_network net;
        std::uint64_t fitness;
    };
    auto evaluate = [&](std::vector<int> perm) {
        auto net = untangle(permute_channels(p.network, perm)).canonical();
        auto f = prefix_fitness(net, cfg.sample_size);
        return individual{std::move(perm), std::move(net), f};
    };

    std::vector<individual> pop;
    pop.push_back(evaluate(identity_permutation(n)));
    auto const initial = pop.front().fitness;
    for (std::size_t i = 1; i < cfg.population; ++i) {
        auto rng = detail::stream(cfg.seed, 0, i);
        auto perm = identity_permutation(n);
        std::shuffle(perm.begin(), perm.end(), rng);
        pop.push_back(evaluate(std::move(perm)));
    }
    auto by_fitness = [](individual const& x, individual const& y) { return x.fitness < y.fitness; };
    std::stable_sort(pop.begin(), pop.end(), by_fitness);

    if (n >= 2) {
        for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
            std::vector<individual> next = pop;
            for (std::size_t k = 0; k < cfg.offspring; ++k) {
                auto rng = detail::stream(cfg.seed, gen, k);
                auto perm = pop[std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng)].perm;
                std::uniform_int_distribution<std::size_t> pos(0, perm.size() - 1);
                std::uniform_real_distribution<double> coin(0.0, 1.0);
                do {
                    auto const i = pos(rng);
                    auto j = pos(rng);
                    while (j == i) {
                        j = pos(rng);
                    }
                    std::swap(perm[i], perm[j]);
                } while (coin(rng) < cfg.mutation_rate);
                next.push_back(evaluate(std::move(perm)));
            }
            std::stable_sort(next.begin(), next.end(), by_fitness);
            next.resize(cfg.population);
            pop = std::move(next);
        }
    }

    auto& best = pop.front();
    return {{best.net, "optimized"}, initial, best.fitness, best.perm};
}

inline prefix optimize_prefix(prefix const& p, ea_config const& cfg = {})
{
    return optimize_prefix_detailed(p, cfg).best;
}

} // namespace sortnet

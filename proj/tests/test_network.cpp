#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <sortnet/catalog.hpp>
#include <sortnet/network.hpp>
#include <sortnet/prefix.hpp>
#include <sortnet/render.hpp>
#include <sortnet/serialize.hpp>

using namespace sortnet;

namespace
{

comparator_network fig1()
{
    return comparator_network(4, {{{1, 2}, {3, 4}}, {{1, 3}, {2, 4}}, {{2, 3}}});
}

bit_vector bv(char const* s) { return parse_bit_vector(s); }

comparator_network random_network(std::mt19937_64& rng, int n, int d)
{
    comparator_network net(n);
    for (int k = 0; k < d; ++k) {
        std::vector<int> ch(static_cast<std::size_t>(n));
        std::iota(ch.begin(), ch.end(), 1);
        std::shuffle(ch.begin(), ch.end(), rng);
        layer l;
        for (std::size_t i = 0; i + 1 < ch.size(); i += 2) {
            if (rng() % 3 != 0) {
                l.push_back({std::min(ch[i], ch[i + 1]), std::max(ch[i], ch[i + 1])});
            }
        }
        net.add_layer(std::move(l));
    }
    return net;
}

// Plain scalar reference: every input, one at a time.
bool sorts_all_scalar(comparator_network const& net)
{
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << net.channels()); ++x) {
        if (!is_sorted(apply_network(net, bit_vector{x, net.channels()}))) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST(BitVector, TextRoundTrip)
{
    auto x = bv("0110");
    EXPECT_EQ(x.width, 4);
    EXPECT_FALSE(x[1]);
    EXPECT_TRUE(x[2]);
    EXPECT_EQ(to_string(x), "0110");
    EXPECT_THROW(parse_bit_vector("01a"), parse_error);
}

TEST(BitVector, IsSorted)
{
    EXPECT_TRUE(is_sorted(bv("0011")));
    EXPECT_FALSE(is_sorted(bv("0101")));
    EXPECT_TRUE(is_sorted(bit_vector{0, 0}));
    EXPECT_TRUE(is_sorted(bv("1111")));
    EXPECT_TRUE(is_sorted(bv("0000")));
}

TEST(Window, Examples)
{
    EXPECT_EQ(window_of(bv("010")), (window{1, 0, 2}));
    EXPECT_EQ(window_of(bv("110")), (window{0, 0, 3}));
    EXPECT_EQ(window_of(bv("0011")).size, 0);
    EXPECT_EQ(window_of(bv("0000")), (window{4, 0, 0}));
    EXPECT_EQ(window_of(bv("1111")), (window{0, 4, 0}));
}

TEST(Window, SizeZeroIffSortedAndBoundsMaximal)
{
    for (int n = 1; n <= 10; ++n) {
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            bit_vector v{x, n};
            auto w = window_of(v);
            EXPECT_EQ(w.size == 0, is_sorted(v));
            if (w.size > 0) {
                EXPECT_TRUE(v[w.a + 1]);
                EXPECT_FALSE(v[n - w.b]);
                for (int i = 1; i <= w.a; ++i) {
                    EXPECT_FALSE(v[i]);
                }
                for (int i = n - w.b + 1; i <= n; ++i) {
                    EXPECT_TRUE(v[i]);
                }
                EXPECT_EQ(w.size, n - w.a - w.b);
            }
        }
    }
}

TEST(Network, OnceConstraintAndBounds)
{
    comparator_network net(3);
    EXPECT_THROW(net.add_layer({{1, 2}, {2, 3}}), argument_error);
    EXPECT_THROW(net.add_layer({{1, 4}}), argument_error);
    EXPECT_THROW(net.add_layer({{2, 2}}), argument_error);
    net.add_layer({{1, 3}});
    EXPECT_EQ(net.depth(), 1);
    EXPECT_EQ(net.size(), 1u);
}

TEST(Apply, Fig1Example)
{
    EXPECT_EQ(to_string(apply_network(fig1(), bv("1010"))), "0011");
}

TEST(Apply, ZerosAndEmptyNetwork)
{
    EXPECT_EQ(to_string(apply_network(fig1(), bv("0000"))), "0000");
    comparator_network empty(5);
    EXPECT_EQ(apply_network(empty, bv("10110")), bv("10110"));
}

TEST(Apply, RejectsWidthMismatchAndTwisted)
{
    EXPECT_THROW(apply_network(fig1(), bv("101")), argument_error);
    comparator_network twisted(2, {{{2, 1}}});
    EXPECT_THROW(apply_network(twisted, bv("01")), argument_error);
    EXPECT_EQ(to_string(apply_generalized(twisted, bv("01"))), "10");
}

TEST(Verify, Examples)
{
    EXPECT_TRUE(verify_sorting(fig1()).sorting);
    auto v = verify_sorting(comparator_network(2));
    ASSERT_FALSE(v.sorting);
    EXPECT_EQ(to_string(*v.counterexample), "10");
    EXPECT_THROW(verify_sorting(comparator_network(25)), limit_error);
    EXPECT_NO_THROW(verify_sorting(comparator_network(25), 25).sorting);
}

TEST(Verify, FirstCounterexampleIsNumericallySmallest)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int const n = 2 + static_cast<int>(rng() % 8);
        auto net = random_network(rng, n, static_cast<int>(rng() % 5));
        auto v = verify_sorting(net);
        EXPECT_EQ(v.sorting, sorts_all_scalar(net));
        if (!v.sorting) {
            for (std::uint64_t x = 0; x < v.counterexample->bits; ++x) {
                EXPECT_TRUE(is_sorted(apply_network(net, bit_vector{x, n})));
            }
            EXPECT_FALSE(is_sorted(apply_network(net, *v.counterexample)));
        }
    }
}

TEST(Verify, IntegerInputsAgreeWithZeroOnePrinciple)
{
    std::mt19937_64 rng(11);
    std::vector<comparator_network> nets = {fig1(), catalog::builtin().get("s17d10-left").network,
                                            comparator_network(4, {{{1, 2}, {3, 4}}, {{1, 3}, {2, 4}}})};
    for (int i = 0; i < 20; ++i) {
        nets.push_back(random_network(rng, 3 + static_cast<int>(rng() % 4), 3 + static_cast<int>(rng() % 4)));
    }
    for (auto const& net : nets) {
        bool all_sorted = true;
        for (int t = 0; t < 1000; ++t) {
            std::vector<int> vals(static_cast<std::size_t>(net.channels()));
            for (auto& x : vals) {
                x = static_cast<int>(rng() % 100);
            }
            apply_values<int>(net, vals);
            all_sorted &= std::is_sorted(vals.begin(), vals.end());
        }
        auto v = verify_sorting(net);
        if (v.sorting) {
            EXPECT_TRUE(all_sorted);
        } else {
            // The binary counterexample is also an integer counterexample.
            std::vector<int> vals;
            for (int c = 1; c <= net.channels(); ++c) {
                vals.push_back((*v.counterexample)[c] ? 1 : 0);
            }
            apply_values<int>(net, vals);
            EXPECT_FALSE(std::is_sorted(vals.begin(), vals.end()));
        }
    }
}

TEST(Apply, WindowBoundariesStayFixedLayerByLayer)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int const n = 3 + static_cast<int>(rng() % 10);
        auto net = random_network(rng, n, 5);
        bit_vector x{rng() & width_mask(n), n};
        auto const w = window_of(x);
        for (int k = 0; k < net.depth(); ++k) {
            x = apply_network(net.slice(k, k + 1), x);
            for (int i = 1; i <= w.a && w.size > 0; ++i) {
                ASSERT_FALSE(x[i]);
            }
            for (int i = n - w.b + 1; i <= n && w.size > 0; ++i) {
                ASSERT_TRUE(x[i]);
            }
        }
    }
}

TEST(Apply, Monotone)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        int const n = 2 + static_cast<int>(rng() % 12);
        auto net = random_network(rng, n, 6);
        auto const y = rng() & width_mask(n);
        auto const x = y & rng();
        auto const fx = apply_network(net, bit_vector{x, n}).bits;
        auto const fy = apply_network(net, bit_vector{y, n}).bits;
        EXPECT_EQ(fx & ~fy, 0u);
    }
}

TEST(OutputSet, Examples)
{
    auto g4 = output_set(green_filter(4, 2).network);
    std::set<std::string> got;
    for (auto y : g4) {
        got.insert(to_string(y));
    }
    EXPECT_EQ(got, (std::set<std::string>{"0000", "0001", "0011", "0101", "0111", "1111"}));
    EXPECT_EQ(output_set(green_filter(8, 3).network).size(), 20u);
    EXPECT_EQ(output_set(comparator_network(2)).size(), 4u);
}

TEST(WindowSum, SmallCasesAndSortingNetworks)
{
    EXPECT_EQ(window_sum(first_layer_pb(3).network), 5u);
    EXPECT_EQ(window_sum(first_layer_bz(3).network), 4u);
    EXPECT_EQ(window_sum(fig1()), 0u);
    EXPECT_EQ(window_sum(catalog::builtin().get("s17d10-right").network), 0u);
}

TEST(WindowSum, FirstLayerTable)
{
    std::vector<std::uint64_t> const pb = {0,    5,    12,   44,    84,    233,   408,   1016,
                                           1704, 4013, 6564, 14948, 24060, 53585, 85296, 186992};
    std::vector<std::uint64_t> const bz = {0,    4,    10,   36,    72,    196,   358,   876,
                                           1524, 3532, 5962, 13380, 22128, 48628, 79246, 171612};
    for (int n = 2; n <= 17; ++n) {
        EXPECT_EQ(window_sum(first_layer_pb(n).network), pb[static_cast<std::size_t>(n - 2)]) << "n=" << n;
        EXPECT_EQ(window_sum(first_layer_bz(n).network), bz[static_cast<std::size_t>(n - 2)]) << "n=" << n;
    }
}

TEST(Permute, Examples)
{
    auto id = identity_permutation(4);
    EXPECT_EQ(permute_channels(fig1(), id), fig1());
    comparator_network single(2, {{{1, 2}}});
    std::vector<int> swap = {2, 1};
    auto twisted = permute_channels(single, swap);
    EXPECT_EQ(twisted.layers()[0][0], (comparator{2, 1}));
    EXPECT_FALSE(twisted.is_standard());
    EXPECT_EQ(untangle(twisted), single);
    std::vector<int> bad = {1, 1};
    EXPECT_THROW(permute_channels(single, bad), argument_error);
}

TEST(Permute, ReversedFig1OutputsArePermutedImages)
{
    std::vector<int> rev = {4, 3, 2, 1};
    auto p = permute_channels(fig1(), rev);
    for (std::uint64_t x = 0; x < 16; ++x) {
        bit_vector in{x, 4};
        bit_vector moved{0, 4};
        for (int c = 1; c <= 4; ++c) {
            moved.set(rev[static_cast<std::size_t>(c - 1)], in[c]);
        }
        auto const out = apply_network(fig1(), in);
        auto const out_p = apply_generalized(p, moved);
        for (int c = 1; c <= 4; ++c) {
            EXPECT_EQ(out_p[rev[static_cast<std::size_t>(c - 1)]], out[c]);
        }
    }
}

TEST(Untangle, StandardIsFixedPoint)
{
    EXPECT_EQ(untangle(fig1()), fig1());
    auto s = catalog::builtin().get("s20d11").network;
    EXPECT_EQ(untangle(s), s);
}

TEST(Untangle, PreservesSortingDepthAndSizeExhaustively)
{
    std::vector<comparator_network> nets = {fig1()};
    // A depth-5 network for 6 channels.
    nets.push_back(comparator_network(6, {{{1, 6}, {2, 5}, {3, 4}},
                                          {{1, 3}, {4, 6}},
                                          {{1, 2}, {3, 4}, {5, 6}},
                                          {{2, 5}},
                                          {{2, 3}, {4, 5}}}));
    for (auto const& net : nets) {
        int const n = net.channels();
        auto const sorting = verify_sorting(net).sorting;
        auto perm = identity_permutation(n);
        do {
            auto u = untangle(permute_channels(net, perm));
            ASSERT_TRUE(u.is_standard());
            EXPECT_EQ(u.depth(), net.depth());
            EXPECT_EQ(u.size(), net.size());
            EXPECT_EQ(verify_sorting(u).sorting, sorting);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST(Untangle, SampledLargeNetworks)
{
    std::mt19937_64 rng(17);
    for (auto id : {"s17d10-left", "s17d10-right", "s20d11"}) {
        auto const net = catalog::builtin().get(id).network;
        for (int t = 0; t < 5; ++t) {
            auto perm = identity_permutation(net.channels());
            std::shuffle(perm.begin(), perm.end(), rng);
            auto u = untangle(permute_channels(net, perm));
            EXPECT_TRUE(u.is_standard());
            EXPECT_EQ(u.depth(), net.depth());
            EXPECT_EQ(u.size(), net.size());
            EXPECT_TRUE(verify_sorting(u).sorting) << id;
        }
    }
}

TEST(Untangle, EagerLeftToRightOrder)
{
    // (2,1) is repaired first, renaming 1<->2 in the next layer: (1,3) becomes (2,3).
    comparator_network t(3, {{{2, 1}}, {{1, 3}}});
    EXPECT_EQ(untangle(t), comparator_network(3, {{{1, 2}}, {{2, 3}}}));
}

TEST(Serialize, RoundTripAndCanonicalForm)
{
    auto s = serialize(fig1());
    EXPECT_EQ(s, R"({"channels":4,"layers":[[[1,2],[3,4]],[[1,3],[2,4]],[[2,3]]]})");
    EXPECT_EQ(serialize(deserialize(s)), s);
    auto j = nlohmann::json::parse(s);
    EXPECT_EQ(j["channels"], 4);
    EXPECT_EQ(j["layers"].size(), 3u);
    comparator_network unordered(4, {{{3, 4}, {1, 2}}});
    EXPECT_EQ(serialize(unordered), R"({"channels":4,"layers":[[[1,2],[3,4]]]})");
}

TEST(Serialize, Errors)
{
    EXPECT_THROW(deserialize(R"({"channels":3,"layers":[[[1,2],[2,3]]]})"), parse_error);
    EXPECT_THROW(deserialize(R"({"channels":3,"layers":[[[1,2],)"), parse_error);
    EXPECT_THROW(deserialize(R"({"channels":3})"), parse_error);
    EXPECT_THROW(deserialize(R"({"channels":3,"layers":[[[1,4]]]})"), parse_error);
    EXPECT_THROW(deserialize(R"({"channels":3,"layers":[[[2,1]]]})"), parse_error);
    EXPECT_NO_THROW(deserialize(R"({"channels":3,"layers":[[[2,1]]]})", true));
}

TEST(Serialize, RandomRoundTrip)
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        auto net = random_network(rng, 1 + static_cast<int>(rng() % 20), static_cast<int>(rng() % 6)).canonical();
        EXPECT_EQ(deserialize(serialize(net)), net);
    }
}

TEST(Render, TextShowsChannelsAndLayers)
{
    auto text = render(fig1(), render_format::text);
    for (char const* label : {"1", "2", "3", "4"}) {
        EXPECT_NE(text.find(label), std::string::npos);
    }
    EXPECT_NE(text.find('o'), std::string::npos);
    EXPECT_NE(text.find('|'), std::string::npos);
}

TEST(Render, SvgHasOneGroupPerComparator)
{
    auto svg = render(fig1(), render_format::svg);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t groups = 0;
    for (auto p = svg.find("class=\"comparator\""); p != std::string::npos;
         p = svg.find("class=\"comparator\"", p + 1)) {
        ++groups;
    }
    EXPECT_EQ(groups, 5u);
    std::size_t layers = 0;
    for (auto p = svg.find("class=\"layer\""); p != std::string::npos; p = svg.find("class=\"layer\"", p + 1)) {
        ++layers;
    }
    EXPECT_EQ(layers, 3u);
}

#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "network.hpp"

namespace sortnet
{

/// {"channels": n, "layers": [[[lo,hi],...],...]}, comparators sorted within each layer.
inline nlohmann::json to_json(comparator_network const& net)
{
    auto const canon = net.canonical();
    auto layers = nlohmann::json::array();
    for (auto const& l : canon.layers()) {
        auto jl = nlohmann::json::array();
        for (auto c : l) {
            jl.push_back({c.lo, c.hi});
        }
        layers.push_back(std::move(jl));
    }
    return {{"channels", net.channels()}, {"layers", std::move(layers)}};
}

/// Throws parse_error on malformed structure and on layer/channel violations.
inline comparator_network network_from_json(nlohmann::json const& j, bool allow_twisted = false)
{
    if (!j.is_object() || !j.contains("channels") || !j.contains("layers")) {
        throw parse_error("network document needs \"channels\" and \"layers\"");
    }
    auto const& jc = j.at("channels");
    if (!jc.is_number_integer()) {
        throw parse_error("\"channels\" must be an integer");
    }
    auto const n = jc.get<long long>();
    if (n < 0 || n > max_channels) {
        throw parse_error("\"channels\" must be in [0, 64]");
    }
    auto const& jl = j.at("layers");
    if (!jl.is_array()) {
        throw parse_error("\"layers\" must be an array");
    }
    try {
        comparator_network net(static_cast<int>(n));
        for (auto const& l : jl) {
            if (!l.is_array()) {
                throw parse_error("each layer must be an array of comparators");
            }
            layer cur;
            for (auto const& c : l) {
                if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
                    throw parse_error("each comparator must be a pair of integers");
                }
                auto const lo = c[0].get<long long>();
                auto const hi = c[1].get<long long>();
                if (lo < 1 || hi < 1 || lo > n || hi > n) {
                    throw parse_error("comparator channel out of range");
                }
                if (!allow_twisted && lo >= hi) {
                    throw parse_error("comparator [" + std::to_string(lo) + "," + std::to_string(hi) +
                                      "] must have lo < hi");
                }
                cur.push_back({static_cast<int>(lo), static_cast<int>(hi)});
            }
            net.add_layer(std::move(cur));
        }
        return net;
    } catch (argument_error const& e) {
        throw parse_error(e.what());
    }
}

inline std::string serialize(comparator_network const& net)
{
    return to_json(net).dump();
}

inline comparator_network deserialize(std::string_view text, bool allow_twisted = false)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (nlohmann::json::parse_error const& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
    return network_from_json(j, allow_twisted);
}

} // namespace sortnet

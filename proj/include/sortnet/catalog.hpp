#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "encoder.hpp"
#include "error.hpp"
#include "network.hpp"
#include "serialize.hpp"
#include "sortnet_catalog_data.hpp" // generated from data/catalog at configure time

namespace sortnet
{

struct catalog_entry
{
    std::string id;
    /// "network" for sorting networks, "prefix" for partial networks such as filters.
    std::string kind;
    comparator_network network;
    int claimed_depth = 0;
    int claimed_channels = 0;
    std::string provenance;
    std::string checksum;
};

struct depth_bounds
{
    int lower = 0;
    int upper = 0;
    friend bool operator==(depth_bounds const&, depth_bounds const&) = default;
};

inline constexpr int bounds_max_channels = 20;

class catalog
{
public:
    using file_reader = std::function<std::optional<std::string>(std::string const&)>;

    /// The catalog compiled into the library.
    static catalog const& builtin()
    {
        static catalog const c = [] {
            return catalog([](std::string const& name) -> std::optional<std::string> {
                for (auto const& f : detail::catalog_files) {
                    if (f.name == name) {
                        return std::string(f.text);
                    }
                }
                return std::nullopt;
            });
        }();
        return c;
    }

    /// A catalog read from a directory holding index.json and the network files.
    static catalog from_directory(std::filesystem::path const& dir)
    {
        return catalog([dir](std::string const& name) -> std::optional<std::string> {
            std::ifstream is(dir / name, std::ios::binary);
            if (!is) {
                return std::nullopt;
            }
            std::ostringstream ss;
            ss << is.rdbuf();
            return ss.str();
        });
    }

    explicit catalog(file_reader const& read)
    {
        auto const index_text = read("index.json");
        if (!index_text) {
            throw integrity_error("catalog index.json is missing");
        }
        nlohmann::json index;
        try {
            index = nlohmann::json::parse(*index_text);
            for (auto const& e : index.at("entries")) {
                load_entry(e, read);
            }
            auto const& b = index.at("bounds");
            old_upper_ = b.at("old_upper").get<std::vector<int>>();
            new_upper_ = b.at("new_upper").get<std::vector<int>>();
            old_lower_ = b.at("old_lower").get<std::vector<int>>();
            new_lower_ = b.at("new_lower").get<std::vector<int>>();
        } catch (nlohmann::json::exception const& e) {
            throw integrity_error(std::string("malformed catalog index: ") + e.what());
        }
        for (auto const* row : {&old_upper_, &new_upper_, &old_lower_, &new_lower_}) {
            if (row->size() != static_cast<std::size_t>(bounds_max_channels)) {
                throw integrity_error("catalog bounds rows must cover 1.." + std::to_string(bounds_max_channels));
            }
        }
    }

    std::vector<std::string> list() const
    {
        std::vector<std::string> ids;
        for (auto const& e : entries_) {
            ids.push_back(e.id);
        }
        return ids;
    }

    std::vector<catalog_entry> const& entries() const { return entries_; }

    catalog_entry const& get(std::string const& id) const
    {
        for (auto const& e : entries_) {
            if (e.id == id) {
                return e;
            }
        }
        throw argument_error("unknown catalog id '" + id + "'");
    }

    bool contains(std::string const& id) const
    {
        return std::any_of(entries_.begin(), entries_.end(), [&](auto const& e) { return e.id == id; });
    }

    /// Current (lower, upper) bounds on the minimal depth for n channels.
    depth_bounds bounds(int n) const { return {row(new_lower_, n), row(new_upper_, n)}; }

    /// Bounds as they stood before the 17-, 19- and 20-channel improvements.
    depth_bounds previous_bounds(int n) const { return {row(old_lower_, n), row(old_upper_, n)}; }

private:
    static int row(std::vector<int> const& r, int n)
    {
        if (n < 1 || n > bounds_max_channels) {
            throw argument_error("bounds are tabulated for 1.." + std::to_string(bounds_max_channels) +
                                 " channels, got " + std::to_string(n));
        }
        return r[static_cast<std::size_t>(n - 1)];
    }

    void load_entry(nlohmann::json const& e, file_reader const& read)
    {
        catalog_entry c;
        c.id = e.at("id").get<std::string>();
        c.kind = e.at("kind").get<std::string>();
        c.claimed_channels = e.at("channels").get<int>();
        c.claimed_depth = e.at("depth").get<int>();
        c.provenance = e.at("provenance").get<std::string>();
        c.checksum = e.at("checksum").get<std::string>();
        auto const file = e.at("file").get<std::string>();
        auto const text = read(file);
        if (!text) {
            throw integrity_error("catalog file " + file + " is missing");
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(*text)));
        if (c.checksum != hex) {
            throw integrity_error("catalog file " + file + " has checksum " + hex + ", index records " + c.checksum);
        }
        try {
            c.network = deserialize(*text);
        } catch (error const& ex) {
            throw integrity_error("catalog file " + file + ": " + ex.what());
        }
        if (c.network.channels() != c.claimed_channels || c.network.depth() != c.claimed_depth) {
            throw integrity_error("catalog entry " + c.id + " does not match its claimed channels and depth");
        }
        if (c.kind != "network" && c.kind != "prefix") {
            throw integrity_error("catalog entry " + c.id + " has unknown kind " + c.kind);
        }
        entries_.push_back(std::move(c));
    }

    std::vector<catalog_entry> entries_;
    std::vector<int> old_upper_, new_upper_, old_lower_, new_lower_;
};

inline constexpr std::string_view catalog_scheme = "catalog://";

/// Loads `catalog://ID` from the built-in catalog or a network JSON file from disk.
inline comparator_network load_network(std::string const& ref, bool allow_twisted = false)
{
    if (ref.rfind(catalog_scheme, 0) == 0) {
        return catalog::builtin().get(ref.substr(catalog_scheme.size())).network;
    }
    std::ifstream is(ref);
    if (!is) {
        throw argument_error("cannot open network file " + ref);
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return deserialize(ss.str(), allow_twisted);
}

} // namespace sortnet

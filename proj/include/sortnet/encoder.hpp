#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "bit_vector.hpp"
#include "cnf.hpp"
#include "error.hpp"
#include "network.hpp"
#include "serialize.hpp"

namespace sortnet
{

enum class encoding_mode { original, improved };

inline char const* to_string(encoding_mode m)
{
    return m == encoding_mode::original ? "original" : "improved";
}

inline encoding_mode parse_encoding_mode(std::string const& s)
{
    if (s == "original") {
        return encoding_mode::original;
    }
    if (s == "improved") {
        return encoding_mode::improved;
    }
    throw argument_error("unknown encoding mode '" + s + "' (expected original or improved)");
}

/// What a CNF variable stands for.
struct var_role
{
    enum class kind { comparator, value, one_down, one_up };
    kind what = kind::comparator;
    int layer = 0;
    int i = 0;
    int j = 0;     // comparator / range bound; unused for values
    int input = -1; // index into the input list for values
};

inline char const* to_string(var_role::kind k)
{
    switch (k) {
    case var_role::kind::comparator: return "g";
    case var_role::kind::value: return "v";
    case var_role::kind::one_down: return "oneDown";
    case var_role::kind::one_up: return "oneUp";
    }
    return "?";
}

/// Per-input bookkeeping: the raw input, its image under the prefix and the window of that image.
struct input_block
{
    bit_vector input;
    bit_vector prefix_output;
    window win;
    int first_var = 0; // first value variable; 0 when the block has none
};

/// Variable numbering: comparator variables first (layer-major, then i, then
/// j), then one value block per input in input order, then range auxiliaries
/// allocated on first use.
class var_map
{
public:
    var_map() = default;

    var_map(int channels, int depth, int prefix_depth)
        : n_(channels), d_(depth), p_(prefix_depth), pairs_(channels * (channels - 1) / 2)
    {
        roles_.emplace_back(); // index 0 unused
        for (int k = p_ + 1; k <= d_; ++k) {
            for (int i = 1; i <= n_; ++i) {
                for (int j = i + 1; j <= n_; ++j) {
                    roles_.push_back({var_role::kind::comparator, k, i, j, -1});
                }
            }
        }
    }

    int channels() const { return n_; }
    int depth() const { return d_; }
    int prefix_depth() const { return p_; }
    int num_vars() const { return static_cast<int>(roles_.size()) - 1; }
    int num_comparator_vars() const { return (d_ - p_) * pairs_; }

    /// Comparator (i, j), i < j, in free layer k.
    int g(int k, int i, int j) const
    {
        return 1 + (k - p_ - 1) * pairs_ + pair_index(i, j);
    }

    std::vector<input_block> const& inputs() const { return blocks_; }

    /// Value of window channel i after free layer k (p < k < d) for input `idx`.
    int v(std::size_t idx, int k, int i) const
    {
        auto const& b = blocks_[idx];
        return b.first_var + (k - p_ - 1) * b.win.size + (i - b.win.a - 1);
    }

    var_role const& role(int var) const { return roles_[static_cast<std::size_t>(var)]; }

    std::size_t add_input(bit_vector x, bit_vector prefix_output)
    {
        input_block b{x, prefix_output, window_of(prefix_output), 0};
        int const inner_layers = d_ - p_ - 1;
        auto const idx = blocks_.size();
        if (b.win.size > 0 && inner_layers > 0) {
            b.first_var = num_vars() + 1;
            for (int k = p_ + 1; k < d_; ++k) {
                for (int i = b.win.a + 1; i <= n_ - b.win.b; ++i) {
                    roles_.push_back({var_role::kind::value, k, i, 0, static_cast<int>(idx)});
                }
            }
        }
        blocks_.push_back(b);
        return idx;
    }

    /// oneDown(k, i, j): some comparator (i, l) with i < l <= j. Returns 0 if not yet allocated.
    int find_range(var_role::kind kind, int k, int i, int j) const
    {
        auto it = ranges_.find({kind, k, i, j});
        return it == ranges_.end() ? 0 : it->second;
    }

    int add_range(var_role::kind kind, int k, int i, int j)
    {
        roles_.push_back({kind, k, i, j, -1});
        ranges_[{kind, k, i, j}] = num_vars();
        return num_vars();
    }

    std::size_t num_range_vars() const { return ranges_.size(); }

private:
    int pair_index(int i, int j) const
    {
        // Pairs (i, j) for fixed i start after all pairs with smaller i.
        return (i - 1) * n_ - (i - 1) * i / 2 + (j - i - 1);
    }

    int n_ = 0;
    int d_ = 0;
    int p_ = 0;
    int pairs_ = 0;
    std::vector<var_role> roles_;
    std::vector<input_block> blocks_;
    std::map<std::tuple<var_role::kind, int, int, int>, int> ranges_;
};

struct encoding_stats
{
    std::size_t variables = 0;
    std::size_t clauses = 0;
    std::size_t literals = 0;
    std::size_t valid_clauses = 0;
    std::size_t range_definition_clauses = 0;
};

/// valid(C) and sorts(C, x) for each input.
struct cnf_instance
{
    cnf formula;
    var_map vars;
    comparator_network prefix;
    encoding_mode mode = encoding_mode::improved;
    bool trivially_unsat = false;
    encoding_stats stats;

    int channels() const { return vars.channels(); }
    int depth() const { return vars.depth(); }
};

inline std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail
{

/// Literal or constant. Constants are +-const_true so negation stays unary minus.
inline constexpr int const_true = INT_MAX;
inline constexpr int const_false = -INT_MAX;

inline int constant(bool b) { return b ? const_true : const_false; }

/// Collects one clause, folding constants and duplicate literals.
class clause_builder
{
public:
    clause_builder& operator<<(int t)
    {
        if (t == const_true) {
            satisfied_ = true;
        } else if (t != const_false) {
            lits_.push_back(t);
        }
        return *this;
    }

    /// Sorted literal list, or nothing if the clause is satisfied or tautological.
    bool finish(std::vector<int>& out)
    {
        if (satisfied_) {
            return false;
        }
        std::sort(lits_.begin(), lits_.end(), [](int x, int y) {
            return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : x < y;
        });
        lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
        for (std::size_t i = 0; i + 1 < lits_.size(); ++i) {
            if (lits_[i] == -lits_[i + 1]) {
                return false;
            }
        }
        out = std::move(lits_);
        return true;
    }

private:
    std::vector<int> lits_;
    bool satisfied_ = false;
};

} // namespace detail

/// Builds and grows the formula for "a depth-d network extending `prefix` sorts these inputs".
class encoder
{
public:
    encoder(int n, int d, comparator_network prefix, encoding_mode mode)
    {
        if (prefix.channels() != n) {
            throw argument_error("prefix has " + std::to_string(prefix.channels()) + " channels, expected " +
                                 std::to_string(n));
        }
        if (prefix.depth() > d) {
            throw argument_error("prefix depth " + std::to_string(prefix.depth()) + " exceeds target depth " +
                                 std::to_string(d));
        }
        detail::require_standard(prefix);
        prefix_flat_ = detail::flatten(prefix);
        inst_.vars = var_map(n, d, prefix.depth());
        inst_.prefix = std::move(prefix);
        inst_.mode = mode;
        inst_.formula.reserve_vars(inst_.vars.num_vars());
        encode_valid();
        inst_.stats.valid_clauses = inst_.formula.num_clauses();
        refresh_stats();
    }

    cnf_instance const& instance() const { return inst_; }
    cnf_instance release() { return std::move(inst_); }

    /// Appends inputs (value blocks first, then their clauses). Returns the
    /// index of the first new clause.
    std::size_t add_inputs(std::span<bit_vector const> inputs)
    {
        auto const first_clause = inst_.formula.num_clauses();
        std::vector<std::size_t> idx;
        for (auto x : inputs) {
            if (x.width != inst_.channels()) {
                throw argument_error("input width does not match channel count");
            }
            auto y = bit_vector{detail::apply_flat(prefix_flat_, x.bits), x.width};
            idx.push_back(inst_.vars.add_input(x, y));
        }
        inst_.formula.reserve_vars(inst_.vars.num_vars());
        for (auto i : idx) {
            encode_sorts(i);
        }
        refresh_stats();
        return first_clause;
    }

    std::size_t add_input(bit_vector x) { return add_inputs(std::span<bit_vector const>(&x, 1)); }

private:
    int n() const { return inst_.vars.channels(); }
    int d() const { return inst_.vars.depth(); }
    int p() const { return inst_.vars.prefix_depth(); }

    void emit(std::vector<int> const& clause)
    {
        if (clause.empty()) {
            inst_.trivially_unsat = true;
        }
        inst_.formula.add_clause(clause);
    }

    /// Each channel in each free layer is used by at most one comparator.
    void encode_valid()
    {
        std::set<std::pair<int, int>> seen;
        for (int k = p() + 1; k <= d(); ++k) {
            for (int c = 1; c <= n(); ++c) {
                std::vector<int> touching;
                for (int o = 1; o <= n(); ++o) {
                    if (o != c) {
                        touching.push_back(inst_.vars.g(k, std::min(c, o), std::max(c, o)));
                    }
                }
                for (std::size_t x = 0; x < touching.size(); ++x) {
                    for (std::size_t y = x + 1; y < touching.size(); ++y) {
                        auto key = std::minmax(touching[x], touching[y]);
                        if (seen.insert(key).second) {
                            emit({-key.first, -key.second});
                        }
                    }
                }
            }
        }
    }

    void refresh_stats()
    {
        inst_.stats.variables = static_cast<std::size_t>(inst_.formula.num_vars());
        inst_.stats.clauses = inst_.formula.num_clauses();
        inst_.stats.literals = inst_.formula.num_literals();
    }

    /// Range variable over comparators (i, l), i < l <= j (down) or (l, j), i <= l < j (up).
    int range(var_role::kind kind, int k, int i, int j)
    {
        std::vector<int> members;
        if (kind == var_role::kind::one_down) {
            for (int l = i + 1; l <= j; ++l) {
                members.push_back(inst_.vars.g(k, i, l));
            }
        } else {
            for (int l = i; l < j; ++l) {
                members.push_back(inst_.vars.g(k, l, j));
            }
        }
        if (members.empty()) {
            return detail::const_false;
        }
        if (members.size() == 1) {
            return members.front();
        }
        if (int v = inst_.vars.find_range(kind, k, i, j)) {
            return v;
        }
        int const o = inst_.vars.add_range(kind, k, i, j);
        inst_.formula.reserve_vars(inst_.vars.num_vars());
        std::vector<int> def{-o};
        def.insert(def.end(), members.begin(), members.end());
        emit(def);
        for (int m : members) {
            emit({-m, o});
        }
        inst_.stats.range_definition_clauses += members.size() + 1;
        return o;
    }

    void encode_sorts(std::size_t idx)
    {
        auto const block = inst_.vars.inputs()[idx];
        auto const w = block.win;
        if (w.size == 0) {
            return;
        }
        auto const z = block.prefix_output;
        auto const y = sorted_copy(z);
        if (d() == p()) {
            emit({}); // unsorted and no free layers left
            return;
        }
        int const lo = w.a + 1;
        int const hi = n() - w.b;
        auto value = [&](int k, int i) -> int {
            if (i < lo) {
                return detail::const_false;
            }
            if (i > hi) {
                return detail::const_true;
            }
            if (k == p()) {
                return detail::constant(z[i]);
            }
            if (k == d()) {
                return detail::constant(y[i]);
            }
            return inst_.vars.v(idx, k, i);
        };

        std::vector<std::vector<int>> out;
        std::set<std::vector<int>> seen;
        auto add = [&](std::initializer_list<int> terms) {
            detail::clause_builder b;
            for (int t : terms) {
                b << t;
            }
            std::vector<int> c;
            if (b.finish(c) && seen.insert(c).second) {
                out.push_back(std::move(c));
            }
        };

        for (int k = p() + 1; k <= d(); ++k) {
            for (int i = lo; i <= hi; ++i) {
                int const before = value(k - 1, i);
                int const after = value(k, i);
                if (inst_.mode == encoding_mode::original) {
                    // not used -> value copied; the used-disjunction is inlined.
                    detail::clause_builder keep1, keep0;
                    keep1 << -before << after;
                    keep0 << before << -after;
                    for (int j = lo; j <= hi; ++j) {
                        if (j != i) {
                            int const g = inst_.vars.g(k, std::min(i, j), std::max(i, j));
                            keep1 << g;
                            keep0 << g;
                        }
                    }
                    for (auto* b : {&keep1, &keep0}) {
                        std::vector<int> c;
                        if (b->finish(c) && seen.insert(c).second) {
                            out.push_back(std::move(c));
                        }
                    }
                    for (int j = lo; j <= hi; ++j) {
                        if (j == i) {
                            continue;
                        }
                        int const other = value(k - 1, j);
                        if (j < i) {
                            // i receives the max: after <-> other | before
                            int const g = inst_.vars.g(k, j, i);
                            add({-g, -after, other, before});
                            add({-g, after, -other});
                            add({-g, after, -before});
                        } else {
                            // i receives the min: after <-> other & before
                            int const g = inst_.vars.g(k, i, j);
                            add({-g, after, -other, -before});
                            add({-g, -after, other});
                            add({-g, -after, before});
                        }
                    }
                } else {
                    // A 1 stays unless a comparator pulls it down inside the
                    // window; a 0 stays unless one pushes it up.
                    add({-before, range(var_role::kind::one_down, k, i, hi), after});
                    add({before, range(var_role::kind::one_up, k, lo, i), -after});
                    for (int j = lo; j <= hi; ++j) {
                        if (j == i) {
                            continue;
                        }
                        int const other = value(k - 1, j);
                        if (j < i) {
                            int const g = inst_.vars.g(k, j, i);
                            add({-g, after, -other});
                            add({-g, -after, other, before});
                        } else {
                            int const g = inst_.vars.g(k, i, j);
                            add({-g, -after, other});
                            add({-g, after, -other, -before});
                        }
                    }
                }
            }
        }
        for (auto const& c : out) {
            emit(c);
        }
    }

    cnf_instance inst_;
    std::vector<std::array<std::uint8_t, 2>> prefix_flat_;
};

/// One-shot encoding of valid(C) and sorts(C, x) for every input.
inline cnf_instance encode_problem(int n, int d, comparator_network const& prefix, std::span<bit_vector const> inputs,
                                   encoding_mode mode)
{
    std::set<bit_vector> distinct(inputs.begin(), inputs.end());
    if (distinct.size() != inputs.size()) {
        throw argument_error("inputs must be distinct");
    }
    encoder e(n, d, prefix, mode);
    e.add_inputs(inputs);
    return e.release();
}

/// Network made of the prefix followed by the free layers whose comparator
/// variables are true. `model[v]` is the value of variable v.
inline comparator_network decode_model(cnf_instance const& inst, std::vector<bool> const& model)
{
    auto const& vm = inst.vars;
    if (model.size() < static_cast<std::size_t>(vm.num_comparator_vars()) + 1) {
        throw argument_error("assignment does not cover the comparator variables");
    }
    auto net = inst.prefix;
    for (int k = vm.prefix_depth() + 1; k <= vm.depth(); ++k) {
        layer l;
        for (int i = 1; i <= vm.channels(); ++i) {
            for (int j = i + 1; j <= vm.channels(); ++j) {
                if (model[static_cast<std::size_t>(vm.g(k, i, j))]) {
                    l.push_back({i, j});
                }
            }
        }
        try {
            net.add_layer(std::move(l));
        } catch (argument_error const& e) {
            throw integrity_error(std::string("decoded layer violates the once-constraint: ") + e.what());
        }
    }
    return net;
}

/// Sidecar document mapping each variable to its role, for decoding models of external solvers.
inline nlohmann::json varmap_to_json(cnf_instance const& inst)
{
    auto const& vm = inst.vars;
    nlohmann::json vars = nlohmann::json::array();
    for (int v = 1; v <= vm.num_vars(); ++v) {
        auto const& r = vm.role(v);
        nlohmann::json e{{"var", v}, {"role", to_string(r.what)}, {"k", r.layer}, {"i", r.i}};
        if (r.what == var_role::kind::value) {
            e["input"] = r.input;
        } else {
            e["j"] = r.j;
        }
        vars.push_back(std::move(e));
    }
    nlohmann::json inputs = nlohmann::json::array();
    for (auto const& b : vm.inputs()) {
        inputs.push_back({{"input", to_string(b.input)},
                          {"prefix_output", to_string(b.prefix_output)},
                          {"window", {b.win.a, b.win.b, b.win.size}}});
    }
    return {{"channels", vm.channels()},
            {"depth", vm.depth()},
            {"prefix", to_json(inst.prefix)},
            {"prefix_hash", fnv1a64(serialize(inst.prefix))},
            {"mode", to_string(inst.mode)},
            {"num_vars", vm.num_vars()},
            {"num_clauses", inst.formula.num_clauses()},
            {"inputs", std::move(inputs)},
            {"variables", std::move(vars)}};
}

} // namespace sortnet

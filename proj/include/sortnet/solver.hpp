#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cnf.hpp"
#include "encoder.hpp"
#include "error.hpp"

namespace sortnet
{

enum class solve_status { sat, unsat, unknown };

inline char const* to_string(solve_status s)
{
    switch (s) {
    case solve_status::sat: return "sat";
    case solve_status::unsat: return "unsat";
    case solve_status::unknown: return "unknown";
    }
    return "?";
}

/// Limits for one solve call; unset means unlimited.
struct solve_budget
{
    std::optional<std::uint64_t> conflicts;
    std::optional<double> seconds;
};

struct solver_options
{
    double var_decay = 0.95;
    /// Learnt-clause activity decay. Close to 1 keeps long-unused learnts around longer.
    double clause_decay = 0.9999;
    std::uint64_t restart_first = 100;
    double restart_inc = 1.5;
    double learntsize_factor = 1.0 / 3.0;
    double learntsize_inc = 1.1;
    double random_freq = 0.0;
    std::uint64_t seed = 91648253;
    /// Failed-literal probing at the root over `probe_vars` before search.
    bool probing = false;
    std::vector<int> probe_vars;
};

struct solve_stats
{
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
    std::uint64_t probed_units = 0;
    double seconds = 0.0;
};

struct solve_result
{
    solve_status status = solve_status::unknown;
    std::optional<std::vector<bool>> model; // model[v] for v in 1..num_vars
    solve_stats stats;
};

/// Incremental CDCL solver: clauses may be added between solve() calls.
class cdcl_solver
{
public:
    explicit cdcl_solver(solver_options opts = {}) : opts_(std::move(opts)), rng_(opts_.seed) {}

    int num_vars() const { return static_cast<int>(assigns_.size()); }
    solve_stats const& stats() const { return stats_; }

    void reserve_vars(int n)
    {
        while (num_vars() < n) {
            new_var();
        }
    }

    /// DIMACS literals; returns false once the formula is known unsatisfiable.
    bool add_clause(std::span<int const> dimacs)
    {
        if (!ok_) {
            return false;
        }
        cancel_until(0);
        tmp_.clear();
        for (int l : dimacs) {
            if (l == 0) {
                throw argument_error("zero literal in clause");
            }
            reserve_vars(std::abs(l));
            tmp_.push_back(make_lit(std::abs(l) - 1, l < 0));
        }
        std::sort(tmp_.begin(), tmp_.end());
        std::size_t j = 0;
        lit prev = lit_undef;
        for (std::size_t i = 0; i < tmp_.size(); ++i) {
            auto const p = tmp_[i];
            auto const val = value(p);
            if (val == lbool_true || p == (prev ^ 1u)) {
                return true;
            }
            if (val != lbool_false && p != prev) {
                tmp_[j++] = prev = p;
            }
        }
        tmp_.resize(j);
        if (tmp_.empty()) {
            return ok_ = false;
        }
        if (tmp_.size() == 1) {
            enqueue(tmp_[0], cref_none);
            return ok_ = (propagate() == cref_none);
        }
        auto const cr = alloc_clause(tmp_, false);
        clauses_.push_back(cr);
        attach(cr);
        return true;
    }

    bool add_clause(std::initializer_list<int> c) { return add_clause(std::span<int const>(c.begin(), c.size())); }

    void add_formula(cnf const& f, std::size_t from = 0)
    {
        reserve_vars(f.num_vars());
        for (std::size_t i = from; i < f.num_clauses(); ++i) {
            add_clause(f.clause(i));
        }
    }

    solve_status solve(solve_budget const& budget = {})
    {
        auto const start = std::chrono::steady_clock::now();
        model_.clear();
        auto const conflicts_at_start = stats_.conflicts;
        auto finish = [&](solve_status s) {
            stats_.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            cancel_until(0);
            return s;
        };
        if (!ok_) {
            return finish(solve_status::unsat);
        }
        if (opts_.probing && !probed_) {
            probed_ = true;
            if (!probe()) {
                return finish(solve_status::unsat);
            }
        }
        max_learnts_ = std::max(static_cast<double>(clauses_.size()) * opts_.learntsize_factor, 1000.0);
        std::uint64_t restart_len = opts_.restart_first;
        for (;;) {
            auto r = search(restart_len, budget, start, conflicts_at_start);
            if (r == lbool_true) {
                model_.assign(assigns_.size() + 1, false);
                for (std::size_t v = 0; v < assigns_.size(); ++v) {
                    model_[v + 1] = assigns_[v] == lbool_true;
                }
                return finish(solve_status::sat);
            }
            if (r == lbool_false) {
                ok_ = false;
                return finish(solve_status::unsat);
            }
            if (out_of_budget(budget, start, conflicts_at_start)) {
                return finish(solve_status::unknown);
            }
            ++stats_.restarts;
            restart_len = static_cast<std::uint64_t>(static_cast<double>(restart_len) * opts_.restart_inc);
            max_learnts_ *= opts_.learntsize_inc;
        }
    }

    /// Valid after solve() returned sat; model()[v] for v in 1..num_vars().
    std::vector<bool> const& model() const { return model_; }

private:
    using lit = std::uint32_t;
    using cref = std::uint32_t;
    using lbool = std::int8_t;
    static constexpr lit lit_undef = ~lit{0};
    static constexpr cref cref_none = ~cref{0};
    static constexpr lbool lbool_true = 1;
    static constexpr lbool lbool_false = -1;
    static constexpr lbool lbool_undef = 0;
    // Clause layout in the arena: size, flags, activity bits, literals.
    static constexpr std::uint32_t header = 3;
    static constexpr std::uint32_t flag_learnt = 1;
    static constexpr std::uint32_t flag_deleted = 2;
    static constexpr std::uint32_t flag_moved = 4;

    struct watcher
    {
        cref cr;
        lit blocker;
    };

    static lit make_lit(int var, bool neg) { return static_cast<lit>(var) * 2u + (neg ? 1u : 0u); }
    static int var_of(lit p) { return static_cast<int>(p >> 1); }
    static bool sign(lit p) { return p & 1u; }

    lbool value(lit p) const
    {
        auto const v = assigns_[static_cast<std::size_t>(var_of(p))];
        return sign(p) ? static_cast<lbool>(-v) : v;
    }

    int level_of(int v) const { return levels_[static_cast<std::size_t>(v)]; }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    std::uint32_t csize(cref cr) const { return arena_[cr]; }
    lit* clits(cref cr) { return &arena_[cr + header]; }
    bool learnt(cref cr) const { return arena_[cr + 1] & flag_learnt; }
    float activity_of(cref cr) const { return std::bit_cast<float>(arena_[cr + 2]); }
    void set_activity(cref cr, float a) { arena_[cr + 2] = std::bit_cast<std::uint32_t>(a); }

    int new_var()
    {
        int const v = num_vars();
        assigns_.push_back(lbool_undef);
        levels_.push_back(0);
        reasons_.push_back(cref_none);
        polarity_.push_back(true);
        activity_.push_back(0.0);
        seen_.push_back(0);
        heap_index_.push_back(-1);
        watches_.emplace_back();
        watches_.emplace_back();
        heap_insert(v);
        return v;
    }

    cref alloc_clause(std::span<lit const> lits, bool is_learnt)
    {
        auto const cr = static_cast<cref>(arena_.size());
        arena_.push_back(static_cast<std::uint32_t>(lits.size()));
        arena_.push_back(is_learnt ? flag_learnt : 0u);
        arena_.push_back(std::bit_cast<std::uint32_t>(0.0f));
        arena_.insert(arena_.end(), lits.begin(), lits.end());
        return cr;
    }

    void attach(cref cr)
    {
        auto* c = clits(cr);
        watches_[c[0] ^ 1u].push_back({cr, c[1]});
        watches_[c[1] ^ 1u].push_back({cr, c[0]});
    }

    void enqueue(lit p, cref from)
    {
        auto const v = static_cast<std::size_t>(var_of(p));
        assigns_[v] = sign(p) ? lbool_false : lbool_true;
        levels_[v] = decision_level();
        reasons_[v] = from;
        trail_.push_back(p);
    }

    cref propagate()
    {
        cref confl = cref_none;
        while (qhead_ < trail_.size()) {
            lit const p = trail_[qhead_++];
            auto& ws = watches_[p];
            lit const false_lit = p ^ 1u;
            ++stats_.propagations;
            std::size_t i = 0, j = 0;
            std::size_t const end = ws.size();
            while (i < end) {
                auto const w = ws[i];
                if (value(w.blocker) == lbool_true) {
                    ws[j++] = ws[i++];
                    continue;
                }
                auto* c = clits(w.cr);
                if (c[0] == false_lit) {
                    std::swap(c[0], c[1]);
                }
                ++i;
                lit const first = c[0];
                watcher const nw{w.cr, first};
                if (first != w.blocker && value(first) == lbool_true) {
                    ws[j++] = nw;
                    continue;
                }
                auto const sz = csize(w.cr);
                bool moved = false;
                for (std::uint32_t k = 2; k < sz; ++k) {
                    if (value(c[k]) != lbool_false) {
                        std::swap(c[1], c[k]);
                        watches_[c[1] ^ 1u].push_back(nw);
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    continue;
                }
                ws[j++] = nw;
                if (value(first) == lbool_false) {
                    confl = w.cr;
                    qhead_ = trail_.size();
                    while (i < end) {
                        ws[j++] = ws[i++];
                    }
                } else {
                    enqueue(first, w.cr);
                }
            }
            ws.resize(j);
        }
        return confl;
    }

    void cancel_until(int level)
    {
        if (decision_level() <= level) {
            return;
        }
        for (auto c = trail_.size(); c-- > trail_lim_[static_cast<std::size_t>(level)];) {
            auto const v = var_of(trail_[c]);
            assigns_[static_cast<std::size_t>(v)] = lbool_undef;
            polarity_[static_cast<std::size_t>(v)] = sign(trail_[c]);
            if (heap_index_[static_cast<std::size_t>(v)] < 0) {
                heap_insert(v);
            }
        }
        trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
        qhead_ = trail_.size();
        trail_lim_.resize(static_cast<std::size_t>(level));
    }

    // --- activity heap -------------------------------------------------

    bool heap_less(int a, int b) const
    {
        return activity_[static_cast<std::size_t>(a)] > activity_[static_cast<std::size_t>(b)];
    }

    void heap_up(std::size_t i)
    {
        int const v = heap_[i];
        while (i > 0) {
            auto const parent = (i - 1) / 2;
            if (!heap_less(v, heap_[parent])) {
                break;
            }
            heap_[i] = heap_[parent];
            heap_index_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
            i = parent;
        }
        heap_[i] = v;
        heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(i);
    }

    void heap_down(std::size_t i)
    {
        int const v = heap_[i];
        for (;;) {
            auto child = 2 * i + 1;
            if (child >= heap_.size()) {
                break;
            }
            if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) {
                ++child;
            }
            if (!heap_less(heap_[child], v)) {
                break;
            }
            heap_[i] = heap_[child];
            heap_index_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
            i = child;
        }
        heap_[i] = v;
        heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(i);
    }

    void heap_insert(int v)
    {
        heap_.push_back(v);
        heap_up(heap_.size() - 1);
    }

    int heap_pop()
    {
        int const top = heap_.front();
        heap_index_[static_cast<std::size_t>(top)] = -1;
        heap_.front() = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_index_[static_cast<std::size_t>(heap_.front())] = 0;
            heap_down(0);
        }
        return top;
    }

    void bump_var(int v)
    {
        auto& a = activity_[static_cast<std::size_t>(v)];
        if ((a += var_inc_) > 1e100) {
            for (auto& x : activity_) {
                x *= 1e-100;
            }
            var_inc_ *= 1e-100;
        }
        if (auto const idx = heap_index_[static_cast<std::size_t>(v)]; idx >= 0) {
            heap_up(static_cast<std::size_t>(idx));
        }
    }

    void bump_clause(cref cr)
    {
        auto const a = activity_of(cr) + static_cast<float>(cla_inc_);
        set_activity(cr, a);
        if (a > 1e20f) {
            for (auto l : learnts_) {
                set_activity(l, activity_of(l) * 1e-20f);
            }
            cla_inc_ *= 1e-20;
        }
    }

    // --- conflict analysis ----------------------------------------------

    std::uint32_t abstract_level(int v) const { return 1u << (level_of(v) & 31); }

    void analyze(cref confl, std::vector<lit>& out, int& bt_level)
    {
        int path = 0;
        lit p = lit_undef;
        out.clear();
        out.push_back(lit_undef);
        auto index = trail_.size();
        do {
            if (learnt(confl)) {
                bump_clause(confl);
            }
            auto* c = clits(confl);
            auto const sz = csize(confl);
            for (std::uint32_t j = (p == lit_undef) ? 0 : 1; j < sz; ++j) {
                lit const q = c[j];
                auto const v = static_cast<std::size_t>(var_of(q));
                if (!seen_[v] && levels_[v] > 0) {
                    bump_var(var_of(q));
                    seen_[v] = 1;
                    if (levels_[v] >= decision_level()) {
                        ++path;
                    } else {
                        out.push_back(q);
                    }
                }
            }
            while (!seen_[static_cast<std::size_t>(var_of(trail_[--index]))]) {
            }
            p = trail_[index];
            confl = reasons_[static_cast<std::size_t>(var_of(p))];
            seen_[static_cast<std::size_t>(var_of(p))] = 0;
            --path;
        } while (path > 0);
        out[0] = p ^ 1u;

        // Recursive minimization: drop literals implied by the rest.
        analyze_toclear_.assign(out.begin(), out.end());
        std::uint32_t levels = 0;
        for (std::size_t i = 1; i < out.size(); ++i) {
            levels |= abstract_level(var_of(out[i]));
        }
        std::size_t j = 1;
        for (std::size_t i = 1; i < out.size(); ++i) {
            auto const v = var_of(out[i]);
            if (reasons_[static_cast<std::size_t>(v)] == cref_none || !redundant(out[i], levels)) {
                out[j++] = out[i];
            }
        }
        out.resize(j);

        bt_level = 0;
        if (out.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t i = 2; i < out.size(); ++i) {
                if (level_of(var_of(out[i])) > level_of(var_of(out[max_i]))) {
                    max_i = i;
                }
            }
            std::swap(out[1], out[max_i]);
            bt_level = level_of(var_of(out[1]));
        }
        for (auto q : analyze_toclear_) {
            seen_[static_cast<std::size_t>(var_of(q))] = 0;
        }
    }

    bool redundant(lit p, std::uint32_t levels)
    {
        analyze_stack_.clear();
        analyze_stack_.push_back(p);
        auto const top = analyze_toclear_.size();
        while (!analyze_stack_.empty()) {
            auto const q = analyze_stack_.back();
            analyze_stack_.pop_back();
            auto const cr = reasons_[static_cast<std::size_t>(var_of(q))];
            auto const sz = csize(cr);
            for (std::uint32_t i = 1; i < sz; ++i) {
                lit const r = clits(cr)[i];
                auto const v = static_cast<std::size_t>(var_of(r));
                if (!seen_[v] && levels_[v] > 0) {
                    if (reasons_[v] != cref_none && (abstract_level(var_of(r)) & levels) != 0) {
                        seen_[v] = 1;
                        analyze_stack_.push_back(r);
                        analyze_toclear_.push_back(r);
                    } else {
                        for (auto k = top; k < analyze_toclear_.size(); ++k) {
                            seen_[static_cast<std::size_t>(var_of(analyze_toclear_[k]))] = 0;
                        }
                        analyze_toclear_.resize(top);
                        return false;
                    }
                }
            }
        }
        return true;
    }

    // --- clause database --------------------------------------------------

    bool locked(cref cr)
    {
        auto const first = clits(cr)[0];
        return value(first) == lbool_true && reasons_[static_cast<std::size_t>(var_of(first))] == cr;
    }

    void reduce_db()
    {
        std::sort(learnts_.begin(), learnts_.end(), [this](cref x, cref y) {
            bool const bx = csize(x) <= 2, by = csize(y) <= 2;
            if (bx != by) {
                return by; // binaries last (kept)
            }
            return activity_of(x) < activity_of(y);
        });
        double const extra = cla_inc_ / static_cast<double>(std::max<std::size_t>(learnts_.size(), 1));
        std::size_t kept = 0;
        for (std::size_t i = 0; i < learnts_.size(); ++i) {
            auto const cr = learnts_[i];
            bool const remove = csize(cr) > 2 && !locked(cr) &&
                                (i < learnts_.size() / 2 || static_cast<double>(activity_of(cr)) < extra);
            if (remove) {
                arena_[cr + 1] |= flag_deleted;
            } else {
                learnts_[kept++] = cr;
            }
        }
        learnts_.resize(kept);
        collect_garbage();
    }

    /// Compacts the arena and rebuilds watch lists; c[0], c[1] stay the watched literals.
    void collect_garbage()
    {
        std::vector<std::uint32_t> fresh;
        fresh.reserve(arena_.size());
        auto move = [&](cref cr) {
            if (arena_[cr + 1] & flag_moved) {
                return static_cast<cref>(arena_[cr + 2]);
            }
            auto const nc = static_cast<cref>(fresh.size());
            auto const total = header + csize(cr);
            fresh.insert(fresh.end(), arena_.begin() + cr, arena_.begin() + cr + total);
            arena_[cr + 1] |= flag_moved;
            arena_[cr + 2] = nc;
            return nc;
        };
        for (std::size_t v = 0; v < reasons_.size(); ++v) {
            auto& r = reasons_[v];
            if (r != cref_none && assigns_[v] != lbool_undef) {
                r = move(r);
            } else {
                r = cref_none;
            }
        }
        for (auto& cr : clauses_) {
            cr = move(cr);
        }
        for (auto& cr : learnts_) {
            cr = move(cr);
        }
        arena_ = std::move(fresh);
        for (auto& ws : watches_) {
            ws.clear();
        }
        for (auto cr : clauses_) {
            attach(cr);
        }
        for (auto cr : learnts_) {
            attach(cr);
        }
    }

    // --- search -----------------------------------------------------------

    bool out_of_budget(solve_budget const& b, std::chrono::steady_clock::time_point start,
                       std::uint64_t conflicts_at_start) const
    {
        if (b.conflicts && stats_.conflicts - conflicts_at_start >= *b.conflicts) {
            return true;
        }
        if (b.seconds) {
            auto const el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (el >= *b.seconds) {
                return true;
            }
        }
        return false;
    }

    lit pick_branch()
    {
        int next = -1;
        if (opts_.random_freq > 0.0 && !heap_.empty() &&
            std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < opts_.random_freq) {
            next = heap_[std::uniform_int_distribution<std::size_t>(0, heap_.size() - 1)(rng_)];
            if (assigns_[static_cast<std::size_t>(next)] != lbool_undef) {
                next = -1;
            }
        }
        while (next < 0 || assigns_[static_cast<std::size_t>(next)] != lbool_undef) {
            if (heap_.empty()) {
                return lit_undef;
            }
            next = heap_pop();
        }
        return make_lit(next, polarity_[static_cast<std::size_t>(next)]);
    }

    lbool search(std::uint64_t restart_len, solve_budget const& budget, std::chrono::steady_clock::time_point start,
                 std::uint64_t conflicts_at_start)
    {
        std::uint64_t local = 0;
        std::vector<lit> learnt_clause;
        for (;;) {
            auto const confl = propagate();
            if (confl != cref_none) {
                ++stats_.conflicts;
                ++local;
                if (decision_level() == 0) {
                    return lbool_false;
                }
                int bt = 0;
                analyze(confl, learnt_clause, bt);
                cancel_until(bt);
                if (learnt_clause.size() == 1) {
                    enqueue(learnt_clause[0], cref_none);
                } else {
                    auto const cr = alloc_clause(learnt_clause, true);
                    learnts_.push_back(cr);
                    attach(cr);
                    bump_clause(cr);
                    enqueue(learnt_clause[0], cr);
                }
                var_inc_ /= opts_.var_decay;
                cla_inc_ /= opts_.clause_decay;
                if ((stats_.conflicts & 255u) == 0 && out_of_budget(budget, start, conflicts_at_start)) {
                    cancel_until(0);
                    return lbool_undef;
                }
            } else {
                if (local >= restart_len || out_of_budget(budget, start, conflicts_at_start)) {
                    cancel_until(0);
                    return lbool_undef;
                }
                if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) {
                    reduce_db();
                }
                auto const next = pick_branch();
                if (next == lit_undef) {
                    return lbool_true;
                }
                ++stats_.decisions;
                trail_lim_.push_back(trail_.size());
                enqueue(next, cref_none);
            }
        }
    }

    /// Root-level failed-literal probing.
    bool probe()
    {
        if (propagate() != cref_none) {
            return false;
        }
        for (int dv : opts_.probe_vars) {
            int const v = dv - 1;
            if (v < 0 || v >= num_vars()) {
                continue;
            }
            for (bool neg : {false, true}) {
                if (assigns_[static_cast<std::size_t>(v)] != lbool_undef) {
                    break;
                }
                auto const p = make_lit(v, neg);
                trail_lim_.push_back(trail_.size());
                enqueue(p, cref_none);
                bool const failed = propagate() != cref_none;
                cancel_until(0);
                if (failed) {
                    ++stats_.probed_units;
                    enqueue(p ^ 1u, cref_none);
                    if (propagate() != cref_none) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    solver_options opts_;
    std::mt19937_64 rng_;
    bool ok_ = true;
    bool probed_ = false;
    solve_stats stats_;

    std::vector<std::uint32_t> arena_;
    std::vector<cref> clauses_;
    std::vector<cref> learnts_;
    std::vector<std::vector<watcher>> watches_;

    std::vector<lbool> assigns_;
    std::vector<int> levels_;
    std::vector<cref> reasons_;
    std::vector<bool> polarity_; // true = negative phase
    std::vector<double> activity_;
    std::vector<char> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_index_;

    std::vector<lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;

    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    double max_learnts_ = 0.0;

    std::vector<lit> tmp_;
    std::vector<lit> analyze_stack_;
    std::vector<lit> analyze_toclear_;
    std::vector<bool> model_;
};

/// Solves `f` from scratch. A sat model is checked against every clause
/// before it is returned.
inline solve_result solve(cnf const& f, solve_budget const& budget = {}, solver_options const& opts = {})
{
    cdcl_solver s(opts);
    s.reserve_vars(f.num_vars());
    solve_result r;
    for (std::size_t i = 0; i < f.num_clauses(); ++i) {
        if (!s.add_clause(f.clause(i))) {
            break;
        }
    }
    r.status = s.solve(budget);
    r.stats = s.stats();
    if (r.status == solve_status::sat) {
        auto m = s.model();
        m.resize(static_cast<std::size_t>(f.num_vars()) + 1, false);
        if (!f.satisfied_by(m)) {
            throw integrity_error("internal solver returned a model that violates the formula");
        }
        r.model = std::move(m);
    }
    return r;
}

inline solve_result solve(cnf_instance const& inst, solve_budget const& budget = {}, solver_options opts = {})
{
    if (opts.probing && opts.probe_vars.empty()) {
        for (int v = 1; v <= inst.vars.num_comparator_vars(); ++v) {
            opts.probe_vars.push_back(v);
        }
    }
    return solve(inst.formula, budget, opts);
}

} // namespace sortnet

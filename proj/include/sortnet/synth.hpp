#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "bit_vector.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "external_solver.hpp"
#include "network.hpp"
#include "prefix.hpp"
#include "serialize.hpp"
#include "solver.hpp"

namespace sortnet
{

namespace detail
{

/// One distinct prefix output that is not yet sorted, with the smallest raw input producing it.
struct domain_entry
{
    bit_vector input;
    bit_vector output;
    window win;
};

/// Distinct unsorted outputs of `prefix`, ordered by (window size of the output, raw input).
inline std::vector<domain_entry> prefix_domain(comparator_network const& prefix, int limit = default_exhaustive_limit)
{
    int const n = prefix.channels();
    check_exhaustive(n, limit);
    require_standard(prefix);
    auto const flat = flatten(prefix);
    std::vector<bool> seen(std::size_t{1} << n, false);
    std::vector<domain_entry> out;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        auto const z = apply_flat(flat, x);
        if (seen[z]) {
            continue;
        }
        seen[z] = true;
        bit_vector const zv{z, n};
        if (is_sorted(zv)) {
            continue;
        }
        out.push_back({bit_vector{x, n}, zv, window_of(zv)});
    }
    // Inputs were visited in ascending order, so a stable sort keeps the numeric tie-break.
    std::stable_sort(out.begin(), out.end(),
                     [](domain_entry const& p, domain_entry const& q) { return p.win.size < q.win.size; });
    return out;
}

} // namespace detail

/// Up to `count` inputs not sorted by `net` and not in `exclude`, smallest window first,
/// ties by numeric value.
inline std::vector<bit_vector> find_counterexamples(comparator_network const& net, std::set<bit_vector> const& exclude,
                                                    std::size_t count, int limit = default_exhaustive_limit)
{
    int const n = net.channels();
    detail::check_exhaustive(n, limit);
    detail::require_standard(net);
    auto const flat = detail::flatten(net);
    std::vector<std::pair<window, bit_vector>> bad;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        bit_vector const xv{x, n};
        if (is_sorted(bit_vector{detail::apply_flat(flat, x), n}) || exclude.contains(xv)) {
            continue;
        }
        bad.emplace_back(window_of(xv), xv);
    }
    std::stable_sort(bad.begin(), bad.end(), [](auto const& p, auto const& q) { return p.first.size < q.first.size; });
    std::vector<bit_vector> out;
    for (std::size_t i = 0; i < bad.size() && out.size() < count; ++i) {
        out.push_back(bad[i].second);
    }
    return out;
}

inline std::optional<bit_vector> find_counterexample(comparator_network const& net,
                                                     std::set<bit_vector> const& exclude = {},
                                                     int limit = default_exhaustive_limit)
{
    auto v = find_counterexamples(net, exclude, 1, limit);
    if (v.empty()) {
        return std::nullopt;
    }
    return v.front();
}

struct input_strategy
{
    enum class kind { small_window_first, random };
    kind what = kind::small_window_first;
    std::uint64_t seed = 1;
};

inline std::string to_string(input_strategy const& s)
{
    if (s.what == input_strategy::kind::random) {
        return "random:" + std::to_string(s.seed);
    }
    return "small-window-first";
}

/// Accepts "small-window-first", "random" and "random:SEED".
inline input_strategy parse_input_strategy(std::string const& s)
{
    if (s == "small-window-first") {
        return {};
    }
    if (s == "random") {
        return {input_strategy::kind::random, 1};
    }
    if (s.rfind("random:", 0) == 0) {
        try {
            std::size_t pos = 0;
            auto const seed = std::stoull(s.substr(7), &pos);
            if (pos == s.size() - 7) {
                return {input_strategy::kind::random, seed};
            }
        } catch (std::exception const&) {
        }
    }
    throw argument_error("unknown input strategy '" + s + "' (expected small-window-first or random:SEED)");
}

/// `count` raw inputs whose prefix outputs are distinct and unsorted. With
/// small-window-first they are ordered by output window size, then input value;
/// with random they are a seeded sample. Fewer are returned when fewer exist.
inline std::vector<bit_vector> initial_inputs(int n, comparator_network const& prefix, std::size_t count,
                                              input_strategy strategy = {})
{
    if (prefix.channels() != n) {
        throw argument_error("prefix has " + std::to_string(prefix.channels()) + " channels, expected " +
                             std::to_string(n));
    }
    detail::check_exhaustive(n, default_exhaustive_limit);
    if (count > (std::size_t{1} << n)) {
        throw argument_error("initial input count exceeds 2^n");
    }
    if (count == 0) {
        return {};
    }
    auto domain = detail::prefix_domain(prefix);
    if (strategy.what == input_strategy::kind::random) {
        std::mt19937_64 rng(detail::splitmix64(strategy.seed));
        for (std::size_t i = domain.size(); i > 1; --i) {
            auto const j = static_cast<std::size_t>(rng() % i);
            std::swap(domain[i - 1], domain[j]);
        }
    }
    std::vector<bit_vector> out;
    for (std::size_t i = 0; i < domain.size() && out.size() < count; ++i) {
        out.push_back(domain[i].input);
    }
    return out;
}

struct solver_config
{
    enum class backend { internal, external };
    backend which = backend::internal;
    /// Command for the external backend, run as `command <file.cnf>`.
    std::string command;
    solver_options options;
};

struct synth_config
{
    encoding_mode mode = encoding_mode::improved;
    solver_config solver;
    std::size_t batch = 1;
    std::size_t reencode_interval = 64;
    /// Total budget over all solve calls of one run.
    solve_budget budget;
    std::size_t initial_count = 0;
    input_strategy strategy;
    /// Replaces the generated initial inputs when set.
    std::optional<std::vector<bit_vector>> initial_list;

    void validate() const
    {
        if (batch < 1) {
            throw argument_error("batch size must be at least 1");
        }
        if (reencode_interval < 1) {
            throw argument_error("re-encode interval must be at least 1");
        }
        if (solver.which == solver_config::backend::external && solver.command.empty()) {
            throw config_error(std::string("external solver selected but no command given (set ") +
                               solver_env_var + ")");
        }
    }
};

enum class synthesis_verdict { found, no_network, unknown };

inline char const* to_string(synthesis_verdict v)
{
    switch (v) {
    case synthesis_verdict::found: return "found";
    case synthesis_verdict::no_network: return "no-network";
    case synthesis_verdict::unknown: return "unknown";
    }
    return "?";
}

inline synthesis_verdict parse_synthesis_verdict(std::string const& s)
{
    if (s == "found") {
        return synthesis_verdict::found;
    }
    if (s == "no-network") {
        return synthesis_verdict::no_network;
    }
    if (s == "unknown") {
        return synthesis_verdict::unknown;
    }
    throw parse_error("unknown synthesis verdict '" + s + "'");
}

/// Resumable state of one loop run. The instance is rebuilt from the inputs on resume.
struct loop_state
{
    int channels = 0;
    int depth = 0;
    comparator_network prefix;
    encoding_mode mode = encoding_mode::improved;
    std::vector<bit_vector> inputs;
    std::size_t iterations = 0;
    std::optional<solve_status> last_status;
    std::shared_ptr<cnf_instance const> instance;
};

inline nlohmann::json to_json(loop_state const& s)
{
    nlohmann::json inputs = nlohmann::json::array();
    for (auto x : s.inputs) {
        inputs.push_back(to_string(x));
    }
    nlohmann::json j{{"channels", s.channels},
                     {"depth", s.depth},
                     {"prefix", to_json(s.prefix)},
                     {"mode", to_string(s.mode)},
                     {"inputs", std::move(inputs)},
                     {"iterations", s.iterations}};
    j["last_status"] = s.last_status ? nlohmann::json(to_string(*s.last_status)) : nlohmann::json(nullptr);
    return j;
}

inline loop_state loop_state_from_json(nlohmann::json const& j)
{
    try {
        loop_state s;
        s.channels = j.at("channels").get<int>();
        s.depth = j.at("depth").get<int>();
        s.prefix = network_from_json(j.at("prefix"));
        s.mode = parse_encoding_mode(j.at("mode").get<std::string>());
        for (auto const& x : j.at("inputs")) {
            auto v = parse_bit_vector(x.get<std::string>());
            if (v.width != s.channels) {
                throw parse_error("loop state input has the wrong width");
            }
            s.inputs.push_back(v);
        }
        s.iterations = j.at("iterations").get<std::size_t>();
        if (s.prefix.channels() != s.channels) {
            throw parse_error("loop state prefix has the wrong channel count");
        }
        return s;
    } catch (nlohmann::json::exception const& e) {
        throw parse_error(std::string("malformed loop state: ") + e.what());
    } catch (argument_error const& e) {
        throw parse_error(std::string("malformed loop state: ") + e.what());
    }
}

struct iteration_record
{
    std::size_t iteration = 0;
    std::size_t inputs_before = 0;
    solve_status status = solve_status::unknown;
    std::vector<bit_vector> added;
    int window_size = 0; // prefix-output window of the first added input
    std::optional<comparator_network> candidate;
    std::uint64_t conflicts = 0;
    double seconds = 0.0;
};

struct synthesis_outcome
{
    synthesis_verdict verdict = synthesis_verdict::unknown;
    std::optional<comparator_network> network;
    std::size_t iterations = 0;
    std::size_t inputs_used = 0;
    double seconds = 0.0;
    std::uint64_t conflicts = 0;
    loop_state state;
    std::vector<iteration_record> history;
};

inline nlohmann::json to_json(synthesis_outcome const& o)
{
    nlohmann::json j{{"verdict", to_string(o.verdict)},
                     {"iterations", o.iterations},
                     {"inputs", o.inputs_used},
                     {"seconds", o.seconds},
                     {"conflicts", o.conflicts}};
    j["network"] = o.network ? to_json(*o.network) : nlohmann::json(nullptr);
    j["state"] = to_json(o.state);
    return j;
}

namespace detail
{

class loop_runner
{
public:
    loop_runner(loop_state state, synth_config cfg) : state_(std::move(state)), cfg_(std::move(cfg))
    {
        cfg_.validate();
        n_ = state_.channels;
        if (state_.prefix.channels() != n_) {
            throw argument_error("prefix has " + std::to_string(state_.prefix.channels()) + " channels, expected " +
                                 std::to_string(n_));
        }
        if (n_ < 1) {
            throw argument_error("channel count must be positive");
        }
        check_exhaustive(n_, default_exhaustive_limit);
        require_standard(state_.prefix);
        if (state_.prefix.depth() > state_.depth) {
            throw argument_error("prefix depth exceeds target depth");
        }
        domain_ = prefix_domain(state_.prefix);
        prefix_flat_ = flatten(state_.prefix);
        std::set<bit_vector> distinct;
        for (auto x : state_.inputs) {
            if (x.width != n_) {
                throw argument_error("input width does not match channel count");
            }
            if (!distinct.insert(x).second) {
                throw argument_error("inputs must be distinct");
            }
            used_.insert(apply_flat(prefix_flat_, x.bits));
        }
    }

    synthesis_outcome run()
    {
        auto const start = std::chrono::steady_clock::now();
        synthesis_outcome out;
        rebuild();
        std::size_t since_rebuild = 0;
        for (;;) {
            if (since_rebuild >= cfg_.reencode_interval) {
                rebuild();
                since_rebuild = 0;
            }
            auto const elapsed = seconds_since(start);
            solve_budget b;
            if (cfg_.budget.seconds) {
                b.seconds = *cfg_.budget.seconds - elapsed;
            }
            if (cfg_.budget.conflicts) {
                b.conflicts = *cfg_.budget.conflicts > out.conflicts ? *cfg_.budget.conflicts - out.conflicts : 0;
            }
            if ((b.seconds && *b.seconds <= 0) || (b.conflicts && *b.conflicts == 0)) {
                return finish(out, synthesis_verdict::unknown, start);
            }
            ++state_.iterations;
            ++since_rebuild;
            iteration_record rec;
            rec.iteration = state_.iterations;
            rec.inputs_before = state_.inputs.size();
            auto const t0 = std::chrono::steady_clock::now();
            auto r = solve_current(b);
            rec.status = r.status;
            rec.conflicts = r.stats.conflicts;
            rec.seconds = seconds_since(t0);
            out.conflicts += r.stats.conflicts;
            state_.last_status = r.status;
            if (r.status == solve_status::unknown) {
                out.history.push_back(std::move(rec));
                return finish(out, synthesis_verdict::unknown, start);
            }
            if (r.status == solve_status::unsat) {
                out.history.push_back(std::move(rec));
                return finish(out, synthesis_verdict::no_network, start);
            }
            auto net = decode_model(enc_->instance(), *r.model);
            check_instance_inputs(net);
            auto const added = next_inputs(net);
            if (added.empty()) {
                if (!verify_sorting(net).sorting) {
                    throw integrity_error("loop accepted a network that fails exhaustive verification");
                }
                out.history.push_back(std::move(rec));
                out.network = std::move(net);
                return finish(out, synthesis_verdict::found, start);
            }
            if (state_.inputs.size() + added.size() > (std::size_t{1} << n_)) {
                throw integrity_error("input set outgrew 2^n");
            }
            rec.added = added;
            rec.candidate = net;
            rec.window_size = window_of(bit_vector{apply_flat(prefix_flat_, added.front().bits), n_}).size;
            out.history.push_back(std::move(rec));
            for (auto x : added) {
                state_.inputs.push_back(x);
                used_.insert(apply_flat(prefix_flat_, x.bits));
            }
            enc_->add_inputs(added);
            feed();
        }
    }

private:
    static double seconds_since(std::chrono::steady_clock::time_point t)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    }

    void rebuild()
    {
        enc_ = std::make_unique<encoder>(n_, state_.depth, state_.prefix, cfg_.mode);
        enc_->add_inputs(state_.inputs);
        if (cfg_.solver.which == solver_config::backend::internal) {
            auto opts = cfg_.solver.options;
            if (opts.probing && opts.probe_vars.empty()) {
                for (int v = 1; v <= enc_->instance().vars.num_comparator_vars(); ++v) {
                    opts.probe_vars.push_back(v);
                }
            }
            solver_ = std::make_unique<cdcl_solver>(opts);
            fed_ = 0;
            feed();
        }
    }

    void feed()
    {
        if (!solver_) {
            return;
        }
        auto const& f = enc_->instance().formula;
        solver_->add_formula(f, fed_);
        fed_ = f.num_clauses();
    }

    solve_result solve_current(solve_budget const& b)
    {
        auto const& f = enc_->instance().formula;
        if (cfg_.solver.which == solver_config::backend::external) {
            return solve_external(f, cfg_.solver.command);
        }
        solve_result r;
        auto const before = solver_->stats().conflicts;
        r.status = solver_->solve(b);
        r.stats = solver_->stats();
        r.stats.conflicts -= before;
        if (r.status == solve_status::sat) {
            auto m = solver_->model();
            m.resize(static_cast<std::size_t>(f.num_vars()) + 1, false);
            if (!f.satisfied_by(m)) {
                throw integrity_error("internal solver returned a model that violates the formula");
            }
            r.model = std::move(m);
        }
        return r;
    }

    void check_instance_inputs(comparator_network const& net) const
    {
        auto const flat = flatten(net);
        for (auto x : state_.inputs) {
            if (!is_sorted(bit_vector{apply_flat(flat, x.bits), n_})) {
                throw integrity_error("decoded network does not sort an encoded input " + to_string(x));
            }
        }
    }

    std::vector<bit_vector> next_inputs(comparator_network const& net) const
    {
        auto const suffix = flatten(net.slice(state_.prefix.depth(), net.depth()));
        std::vector<bit_vector> out;
        for (auto const& e : domain_) {
            if (used_.contains(e.output.bits)) {
                continue;
            }
            if (!is_sorted(bit_vector{apply_flat(suffix, e.output.bits), n_})) {
                out.push_back(e.input);
                if (out.size() >= cfg_.batch) {
                    break;
                }
            }
        }
        return out;
    }

    synthesis_outcome& finish(synthesis_outcome& out, synthesis_verdict v, std::chrono::steady_clock::time_point start)
    {
        out.verdict = v;
        out.iterations = state_.iterations;
        out.inputs_used = state_.inputs.size();
        out.seconds = seconds_since(start);
        state_.instance = std::make_shared<cnf_instance const>(enc_->release());
        out.state = std::move(state_);
        return out;
    }

    loop_state state_;
    synth_config cfg_;
    int n_ = 0;
    std::vector<domain_entry> domain_;
    std::vector<std::array<std::uint8_t, 2>> prefix_flat_;
    std::unordered_set<std::uint64_t> used_;
    std::unique_ptr<encoder> enc_;
    std::unique_ptr<cdcl_solver> solver_;
    std::size_t fed_ = 0;
};

} // namespace detail

/// Counterexample-guided loop: encode, solve, decode, verify, add the inputs
/// of smallest window the candidate fails on, repeat.
inline synthesis_outcome synthesize(int n, int d, comparator_network const& prefix, synth_config const& cfg = {})
{
    loop_state s;
    s.channels = n;
    s.depth = d;
    s.prefix = prefix;
    s.mode = cfg.mode;
    if (d < 0) {
        throw argument_error("depth must be nonnegative");
    }
    if (prefix.channels() != n) {
        throw argument_error("prefix has " + std::to_string(prefix.channels()) + " channels, expected " +
                             std::to_string(n));
    }
    s.inputs = cfg.initial_list ? *cfg.initial_list : initial_inputs(n, prefix, cfg.initial_count, cfg.strategy);
    return detail::loop_runner(std::move(s), cfg).run();
}

inline synthesis_outcome synthesize(int n, int d, synth_config const& cfg = {})
{
    return synthesize(n, d, comparator_network(n), cfg);
}

/// Continues an interrupted run; `cfg.mode` is taken from the state.
inline synthesis_outcome resume(loop_state state, synth_config cfg)
{
    cfg.mode = state.mode;
    state.instance.reset();
    return detail::loop_runner(std::move(state), std::move(cfg)).run();
}

struct prove_entry
{
    std::size_t index = 0;
    std::string id;
    std::string label;
    synthesis_verdict verdict = synthesis_verdict::unknown;
    std::size_t iterations = 0;
    std::size_t inputs = 0;
    double seconds = 0.0;
    std::optional<comparator_network> network;
    /// Final input set of the run, kept for re-checking unsat verdicts.
    std::vector<bit_vector> final_inputs;
};

enum class bound_verdict { proved, network_found, inconclusive };

inline char const* to_string(bound_verdict v)
{
    switch (v) {
    case bound_verdict::proved: return "proved";
    case bound_verdict::network_found: return "network-found";
    case bound_verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct lower_bound_report
{
    int channels = 0;
    int depth = 0;
    encoding_mode mode = encoding_mode::improved;
    std::vector<prove_entry> entries;
    bound_verdict overall = bound_verdict::inconclusive;
    std::vector<std::string> assumptions;
    double seconds = 0.0;
    unsigned parallelism = 1;
};

/// Runs the loop on every prefix with a pool of `parallelism` workers.
/// "proved" means no prefix extends to a sorting network of depth d.
inline lower_bound_report prove_lower_bound(int n, int d, std::vector<prefix> const& prefixes,
                                            synth_config const& cfg = {}, unsigned parallelism = 1)
{
    if (prefixes.empty()) {
        throw argument_error("prove_lower_bound needs at least one prefix");
    }
    if (parallelism < 1) {
        throw argument_error("parallelism must be at least 1");
    }
    cfg.validate();
    for (auto const& p : prefixes) {
        if (p.channels() != n) {
            throw argument_error("prefix '" + p.label + "' has " + std::to_string(p.channels()) +
                                 " channels, expected " + std::to_string(n));
        }
        if (p.depth() > d) {
            throw argument_error("prefix '" + p.label + "' is deeper than the target depth");
        }
    }
    auto const start = std::chrono::steady_clock::now();
    lower_bound_report rep;
    rep.channels = n;
    rep.depth = d;
    rep.mode = cfg.mode;
    rep.parallelism = parallelism;
    rep.assumptions = {
        "the prefix set covers every depth-" + std::to_string(d) + " network on " + std::to_string(n) +
            " channels up to symmetry; the verdict is only as complete as that set",
        "no extra constraints on the last layers are added to the instances",
    };
    rep.entries.resize(prefixes.size());

    std::mutex sink;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            auto const i = next.fetch_add(1);
            if (i >= prefixes.size()) {
                return;
            }
            prove_entry e;
            e.index = i;
            std::ostringstream id;
            id << 'p' << std::setw(4) << std::setfill('0') << i;
            e.id = id.str();
            e.label = prefixes[i].label;
            try {
                auto o = synthesize(n, d, prefixes[i].network, cfg);
                e.verdict = o.verdict;
                e.iterations = o.iterations;
                e.inputs = o.inputs_used;
                e.seconds = o.seconds;
                e.network = std::move(o.network);
                e.final_inputs = std::move(o.state.inputs);
            } catch (...) {
                std::lock_guard lock(sink);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(prefixes.size());
                return;
            }
            std::lock_guard lock(sink);
            rep.entries[i] = std::move(e);
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        auto const count = std::min<std::size_t>(parallelism, prefixes.size());
        for (std::size_t t = 0; t < count; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    bool any_found = false;
    bool any_unknown = false;
    for (auto const& e : rep.entries) {
        any_found |= e.verdict == synthesis_verdict::found;
        any_unknown |= e.verdict == synthesis_verdict::unknown;
    }
    rep.overall = any_found ? bound_verdict::network_found
                            : (any_unknown ? bound_verdict::inconclusive : bound_verdict::proved);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

inline nlohmann::json to_json(lower_bound_report const& r)
{
    nlohmann::json entries = nlohmann::json::array();
    for (auto const& e : r.entries) {
        nlohmann::json j{{"id", e.id},
                         {"label", e.label},
                         {"verdict", to_string(e.verdict)},
                         {"iterations", e.iterations},
                         {"inputs", e.inputs},
                         {"seconds", e.seconds}};
        j["network"] = e.network ? to_json(*e.network) : nlohmann::json(nullptr);
        entries.push_back(std::move(j));
    }
    return {{"channels", r.channels},   {"depth", r.depth},           {"mode", to_string(r.mode)},
            {"verdict", to_string(r.overall)}, {"assumptions", r.assumptions}, {"seconds", r.seconds},
            {"parallelism", r.parallelism},    {"prefixes", std::move(entries)}};
}

/// Fixed-width table: prefix id, verdict, iterations, inputs, seconds.
inline std::string report_table(lower_bound_report const& r)
{
    std::ostringstream os;
    os << std::left << std::setw(8) << "prefix" << std::setw(12) << "verdict" << std::right << std::setw(11)
       << "iterations" << std::setw(8) << "inputs" << std::setw(10) << "seconds" << '\n';
    for (auto const& e : r.entries) {
        os << std::left << std::setw(8) << e.id << std::setw(12) << to_string(e.verdict) << std::right
           << std::setw(11) << e.iterations << std::setw(8) << e.inputs << std::setw(10) << std::fixed
           << std::setprecision(3) << e.seconds << '\n';
    }
    os << "overall: " << to_string(r.overall) << " (n=" << r.channels << ", depth " << r.depth << ", "
       << r.entries.size() << " prefixes)\n";
    for (auto const& a : r.assumptions) {
        os << "note: " << a << '\n';
    }
    return os.str();
}

} // namespace sortnet

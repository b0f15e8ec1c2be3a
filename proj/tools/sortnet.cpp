// Command-line front end for the sortnet library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <sortnet/sortnet.hpp>

namespace
{

using namespace sortnet;
using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_mismatch = 1;
constexpr int exit_usage = 2;
constexpr int exit_integrity = 3;

struct common_options
{
    std::string json_path;
    std::string expect;
    std::uint64_t seed = 1;
};

struct prefix_options
{
    std::string ref;
    std::string style = "none";
};

struct solver_flags
{
    std::string backend = "internal";
    std::string command;
    std::optional<std::uint64_t> conflicts;
    std::optional<double> seconds;
    bool probing = false;
};

struct synth_flags
{
    std::string mode = "improved";
    std::size_t batch = 1;
    std::size_t initial_count = 0;
    std::string strategy = "small-window-first";
    std::string inputs_path;
    std::size_t reencode_interval = 64;
};

std::string read_file(std::string const& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw argument_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(std::string const& path, std::string const& text)
{
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) {
        throw config_error("cannot write " + path);
    }
}

json parse_json_file(std::string const& path)
{
    try {
        return json::parse(read_file(path));
    } catch (json::parse_error const& e) {
        throw parse_error(path + ": " + e.what());
    }
}

/// none | pb | bz | green:T, or an explicit network reference.
comparator_network make_prefix(int n, prefix_options const& p)
{
    if (!p.ref.empty()) {
        auto net = load_network(p.ref);
        if (net.channels() != n) {
            throw argument_error("prefix " + p.ref + " has " + std::to_string(net.channels()) +
                                 " channels, expected " + std::to_string(n));
        }
        return net;
    }
    if (p.style == "none") {
        return comparator_network(n);
    }
    if (p.style == "pb") {
        return first_layer_pb(n).network;
    }
    if (p.style == "bz") {
        return first_layer_bz(n).network;
    }
    if (p.style.rfind("green:", 0) == 0) {
        int t = 0;
        try {
            t = std::stoi(p.style.substr(6));
        } catch (std::exception const&) {
            throw argument_error("bad green filter depth in '" + p.style + "'");
        }
        return green_filter(n, t).network;
    }
    throw argument_error("unknown prefix style '" + p.style + "' (expected none, pb, bz or green:T)");
}

void add_prefix_flags(CLI::App* app, prefix_options& p)
{
    app->add_option("--prefix", p.ref, "Prefix network (file or catalog://ID)");
    app->add_option("--prefix-style", p.style, "Generated prefix: none, pb, bz or green:T");
}

void add_solver_flags(CLI::App* app, solver_flags& s)
{
    app->add_option("--solver", s.backend, "internal or external")->check(CLI::IsMember({"internal", "external"}));
    app->add_option("--solver-cmd", s.command,
                    std::string("External solver command (default from ") + solver_env_var + ")");
    app->add_option("--conflicts", s.conflicts, "Conflict budget");
    app->add_option("--seconds", s.seconds, "Time budget in seconds");
    app->add_flag("--probing", s.probing, "Failed-literal probing on comparator variables");
}

void add_synth_flags(CLI::App* app, synth_flags& f)
{
    app->add_option("--mode", f.mode, "Encoding: original or improved")
        ->check(CLI::IsMember({"original", "improved"}));
    app->add_option("--batch", f.batch, "Counterexamples added per iteration")->check(CLI::PositiveNumber);
    app->add_option("--initial-count", f.initial_count, "Number of initial inputs");
    app->add_option("--strategy", f.strategy, "Initial inputs: small-window-first or random:SEED");
    app->add_option("--inputs", f.inputs_path, "File with one input vector per line (replaces --initial-count)");
    app->add_option("--reencode-interval", f.reencode_interval, "Iterations between fresh encodings")
        ->check(CLI::PositiveNumber);
}

solver_config make_solver(solver_flags const& s, std::uint64_t seed)
{
    solver_config c;
    c.which = s.backend == "external" ? solver_config::backend::external : solver_config::backend::internal;
    c.command = s.command;
    if (c.command.empty()) {
        if (char const* env = std::getenv(solver_env_var)) {
            c.command = env;
        }
    }
    c.options.seed = seed;
    c.options.probing = s.probing;
    return c;
}

std::vector<bit_vector> read_inputs(std::string const& path, int n)
{
    std::istringstream is(read_file(path));
    std::vector<bit_vector> out;
    std::string line;
    while (std::getline(is, line)) {
        auto const b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') {
            continue;
        }
        auto const e = line.find_last_not_of(" \t\r");
        auto x = parse_bit_vector(line.substr(b, e - b + 1));
        if (x.width != n) {
            throw parse_error(path + ": input " + line + " does not have " + std::to_string(n) + " channels");
        }
        out.push_back(x);
    }
    return out;
}

synth_config make_synth(int n, synth_flags const& f, solver_flags const& s,
                        std::uint64_t seed)
{
    synth_config c;
    c.mode = parse_encoding_mode(f.mode);
    c.solver = make_solver(s, seed);
    c.batch = f.batch;
    c.reencode_interval = f.reencode_interval;
    c.budget.conflicts = s.conflicts;
    c.budget.seconds = s.seconds;
    c.initial_count = f.initial_count;
    c.strategy = parse_input_strategy(f.strategy);
    if (!f.inputs_path.empty()) {
        c.initial_list = read_inputs(f.inputs_path, n);
    }
    c.validate();
    return c;
}

void emit_json(common_options const& o, json const& j)
{
    if (!o.json_path.empty()) {
        write_file(o.json_path, j.dump(2) + "\n");
    }
}

/// Exit code for a verdict against --expect; an empty --expect always passes.
int check_expect(common_options const& o, std::string const& actual, std::vector<std::string> const& allowed)
{
    if (o.expect.empty()) {
        return exit_ok;
    }
    if (std::find(allowed.begin(), allowed.end(), o.expect) == allowed.end()) {
        std::string list;
        for (auto const& a : allowed) {
            list += (list.empty() ? "" : ", ") + a;
        }
        throw argument_error("--expect must be one of: " + list);
    }
    if (o.expect != actual) {
        std::cerr << "expected " << o.expect << ", got " << actual << '\n';
        return exit_mismatch;
    }
    return exit_ok;
}

std::string network_summary(comparator_network const& net)
{
    return std::to_string(net.channels()) + " channels, depth " + std::to_string(net.depth());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sorting network synthesis, verification and lower-bound search"};
    app.fallthrough();
    app.require_subcommand(1);
    common_options common;
    app.add_option("--json", common.json_path, "Also write the result as JSON to FILE")->type_name("FILE");
    app.add_option("--expect", common.expect, "Expected verdict; exit 1 on mismatch")->type_name("VERDICT");
    app.add_option("--seed", common.seed, "Seed for every randomized choice");

    // verify
    auto* verify = app.add_subcommand("verify", "Exhaustive 0-1 check of a network");
    std::string verify_ref;
    int verify_limit = default_exhaustive_limit;
    verify->add_option("network", verify_ref, "Network file or catalog://ID")->required();
    verify->add_option("--limit", verify_limit, "Largest channel count checked exhaustively");

    // render
    auto* render_cmd = app.add_subcommand("render", "Draw a network as text or SVG");
    std::string render_ref, render_fmt = "text", render_out;
    bool render_twisted = false;
    render_cmd->add_option("network", render_ref, "Network file or catalog://ID")->required();
    render_cmd->add_option("--format", render_fmt, "text or svg")->check(CLI::IsMember({"text", "svg"}));
    render_cmd->add_option("-o,--output", render_out, "Output file (default stdout)");
    render_cmd->add_flag("--allow-twisted", render_twisted, "Accept comparators with lo > hi");

    // encode
    auto* encode = app.add_subcommand("encode", "Write the SAT instance as DIMACS plus a variable map");
    int enc_n = 0, enc_d = 0;
    prefix_options enc_prefix;
    synth_flags enc_flags;
    std::string enc_out, enc_varmap;
    encode->add_option("-n,--channels", enc_n, "Channels")->required()->check(CLI::Range(1, max_channels));
    encode->add_option("-d,--depth", enc_d, "Depth")->required()->check(CLI::NonNegativeNumber);
    add_prefix_flags(encode, enc_prefix);
    add_synth_flags(encode, enc_flags);
    encode->add_option("-o,--output", enc_out, "DIMACS output file")->required();
    encode->add_option("--varmap", enc_varmap, "Variable map output (default OUTPUT.varmap.json)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Solve a DIMACS file with the internal solver");
    std::string solve_path;
    solver_flags solve_flags;
    solve_cmd->add_option("cnf", solve_path, "DIMACS file")->required();
    solve_cmd->add_option("--conflicts", solve_flags.conflicts, "Conflict budget");
    solve_cmd->add_option("--seconds", solve_flags.seconds, "Time budget in seconds");

    // synthesize
    auto* synth_cmd = app.add_subcommand("synthesize", "Search for a sorting network of a given depth");
    int syn_n = 0, syn_d = 0;
    prefix_options syn_prefix;
    synth_flags syn_flags;
    solver_flags syn_solver;
    std::string syn_out, syn_resume, syn_state_out;
    synth_cmd->add_option("-n,--channels", syn_n, "Channels")->check(CLI::Range(1, default_exhaustive_limit));
    synth_cmd->add_option("-d,--depth", syn_d, "Depth")->check(CLI::NonNegativeNumber);
    add_prefix_flags(synth_cmd, syn_prefix);
    add_synth_flags(synth_cmd, syn_flags);
    add_solver_flags(synth_cmd, syn_solver);
    synth_cmd->add_option("-o,--output", syn_out, "Write the network found to FILE");
    synth_cmd->add_option("--resume", syn_resume, "Continue from a saved loop state");
    synth_cmd->add_option("--state-out", syn_state_out, "Save the final loop state to FILE");

    // prove
    auto* prove_cmd = app.add_subcommand("prove", "Show that no prefix extends to a network of depth d");
    int prv_n = 0, prv_d = 0;
    std::string prv_prefixes;
    prefix_options prv_prefix;
    prv_prefix.style = "auto";
    synth_flags prv_flags;
    solver_flags prv_solver;
    unsigned prv_jobs = 1;
    prove_cmd->add_option("-n,--channels", prv_n, "Channels")->required()->check(CLI::Range(1, default_exhaustive_limit));
    prove_cmd->add_option("-d,--depth", prv_d, "Depth")->required()->check(CLI::NonNegativeNumber);
    prove_cmd->add_option("--prefixes", prv_prefixes, "JSON array of prefixes (as written by enumerate-prefixes)");
    prove_cmd->add_option("--prefix-style", prv_prefix.style,
                          "auto (BZ layer for n <= 4, else enumerated 2-layer prefixes), enumerated, bz, pb or none");
    add_synth_flags(prove_cmd, prv_flags);
    add_solver_flags(prove_cmd, prv_solver);
    prove_cmd->add_option("-j,--jobs", prv_jobs, "Worker threads")->check(CLI::PositiveNumber);

    // optimize-prefix
    auto* opt_cmd = app.add_subcommand("optimize-prefix", "Permute channels of a prefix to shrink its windows");
    int opt_n = 0;
    prefix_options opt_prefix;
    opt_prefix.style = "pb";
    ea_config opt_cfg;
    std::string opt_out;
    opt_cmd->add_option("-n,--channels", opt_n, "Channels")->required()->check(CLI::Range(1, default_exhaustive_limit));
    add_prefix_flags(opt_cmd, opt_prefix);
    opt_cmd->add_option("--sample-size", opt_cfg.sample_size, "Outputs counted by the fitness");
    opt_cmd->add_option("--population", opt_cfg.population, "Parents kept per generation");
    opt_cmd->add_option("--offspring", opt_cfg.offspring, "Children per generation");
    opt_cmd->add_option("--generations", opt_cfg.generations, "Generations");
    opt_cmd->add_option("--mutation-rate", opt_cfg.mutation_rate, "Probability of each extra transposition");
    opt_cmd->add_option("-o,--output", opt_out, "Write the optimized prefix to FILE");

    // green-filter
    auto* green_cmd = app.add_subcommand("green-filter", "Emit a Green filter prefix");
    int green_n = 0, green_t = 0;
    bool green_outputs = false;
    std::string green_out;
    green_cmd->add_option("-n,--channels", green_n, "Channels (a power of two)")->required();
    green_cmd->add_option("-t,--layers", green_t, "Layers (default log2 n)");
    green_cmd->add_flag("--outputs", green_outputs, "List the distinct outputs");
    green_cmd->add_option("-o,--output", green_out, "Write the prefix to FILE");

    // window-sum
    auto* ws_cmd = app.add_subcommand("window-sum", "Sum of window sizes over the distinct outputs of a prefix");
    int ws_n = 0;
    prefix_options ws_prefix;
    ws_prefix.style = "";
    ws_cmd->add_option("-n,--channels", ws_n, "Channels")->check(CLI::Range(1, default_exhaustive_limit));
    ws_cmd->add_option("--style", ws_prefix.style, "pb, bz or green:T");
    ws_cmd->add_option("--prefix", ws_prefix.ref, "Prefix network (file or catalog://ID)");

    // enumerate-prefixes
    auto* enum_cmd = app.add_subcommand("enumerate-prefixes", "Two-layer prefixes up to symmetry");
    int enum_n = 0, enum_limit = default_enumeration_limit;
    std::string enum_out;
    enum_cmd->add_option("-n,--channels", enum_n, "Channels")->required()->check(CLI::PositiveNumber);
    enum_cmd->add_option("--limit", enum_limit, "Largest channel count accepted");
    enum_cmd->add_option("-o,--output", enum_out, "Write the prefixes as a JSON array to FILE");

    // catalog
    auto* cat_cmd = app.add_subcommand("catalog", "Built-in networks and depth bounds");
    cat_cmd->require_subcommand(1);
    cat_cmd->add_subcommand("list", "List catalog ids");
    auto* cat_show = cat_cmd->add_subcommand("show", "Print a catalog network as JSON");
    std::string cat_id;
    cat_show->add_option("id", cat_id, "Catalog id")->required();
    auto* cat_bounds = cat_cmd->add_subcommand("bounds", "Depth bounds for n channels");
    int cat_n = 0;
    cat_bounds->add_option("n", cat_n, "Channels")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        auto const code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*verify) {
            auto net = load_network(verify_ref);
            auto v = verify_sorting(net, verify_limit);
            if (v.sorting) {
                std::cout << "sorting network: " << network_summary(net) << '\n';
            } else {
                std::cout << "not a sorting network: " << network_summary(net) << ", counterexample "
                          << to_string(*v.counterexample) << '\n';
            }
            json j{{"channels", net.channels()}, {"depth", net.depth()}, {"size", net.size()}, {"sorting", v.sorting}};
            j["counterexample"] = v.counterexample ? json(to_string(*v.counterexample)) : json(nullptr);
            emit_json(common, j);
            return check_expect(common, v.sorting ? "sorting" : "not-sorting", {"sorting", "not-sorting"});
        }

        if (*render_cmd) {
            auto net = load_network(render_ref, render_twisted);
            auto const text = render(net, render_fmt == "svg" ? render_format::svg : render_format::text);
            if (render_out.empty()) {
                std::cout << text;
            } else {
                write_file(render_out, text);
            }
            emit_json(common, {{"format", render_fmt}, {"network", to_json(net)}});
            return exit_ok;
        }

        if (*encode) {
            auto pre = make_prefix(enc_n, enc_prefix);
            std::vector<bit_vector> inputs;
            if (!enc_flags.inputs_path.empty()) {
                inputs = read_inputs(enc_flags.inputs_path, enc_n);
            } else {
                inputs = initial_inputs(enc_n, pre, enc_flags.initial_count, parse_input_strategy(enc_flags.strategy));
            }
            auto inst = encode_problem(enc_n, enc_d, pre, inputs, parse_encoding_mode(enc_flags.mode));
            write_file(enc_out, write_dimacs(inst.formula));
            auto const varmap = enc_varmap.empty() ? enc_out + ".varmap.json" : enc_varmap;
            write_file(varmap, varmap_to_json(inst).dump(2) + "\n");
            std::cout << "wrote " << enc_out << ": " << inst.stats.variables << " variables, " << inst.stats.clauses
                      << " clauses, " << inst.stats.literals << " literals (" << inputs.size() << " inputs, "
                      << to_string(inst.mode) << " encoding)\n";
            emit_json(common, {{"cnf", enc_out},
                               {"varmap", varmap},
                               {"variables", inst.stats.variables},
                               {"clauses", inst.stats.clauses},
                               {"literals", inst.stats.literals},
                               {"inputs", inputs.size()}});
            return exit_ok;
        }

        if (*solve_cmd) {
            auto f = parse_dimacs(read_file(solve_path));
            solve_budget b{solve_flags.conflicts, solve_flags.seconds};
            solver_options opts;
            opts.seed = common.seed;
            auto r = solve(f, b, opts);
            std::cout << competition_output(r);
            json j{{"status", to_string(r.status)},
                   {"conflicts", r.stats.conflicts},
                   {"decisions", r.stats.decisions},
                   {"seconds", r.stats.seconds}};
            if (r.model) {
                std::vector<int> lits;
                for (std::size_t v = 1; v < r.model->size(); ++v) {
                    lits.push_back((*r.model)[v] ? static_cast<int>(v) : -static_cast<int>(v));
                }
                j["model"] = lits;
            }
            emit_json(common, j);
            return check_expect(common, to_string(r.status), {"sat", "unsat", "unknown"});
        }

        if (*synth_cmd) {
            synthesis_outcome o;
            if (!syn_resume.empty()) {
                auto state = loop_state_from_json(parse_json_file(syn_resume));
                auto cfg = make_synth(state.channels, syn_flags, syn_solver, common.seed);
                o = resume(std::move(state), cfg);
            } else {
                if (syn_n < 1) {
                    throw argument_error("synthesize needs -n (or --resume)");
                }
                if (synth_cmd->count("--depth") == 0) {
                    throw argument_error("synthesize needs -d (or --resume)");
                }
                auto pre = make_prefix(syn_n, syn_prefix);
                auto cfg = make_synth(syn_n, syn_flags, syn_solver, common.seed);
                o = synthesize(syn_n, syn_d, pre, cfg);
            }
            auto const& st = o.state;
            std::string detail = " (" + std::to_string(o.iterations) + " iterations, " +
                                 std::to_string(o.inputs_used) + " inputs, " + std::to_string(o.seconds) + " s)";
            switch (o.verdict) {
            case synthesis_verdict::found:
                std::cout << "FOUND: sorting network: " << network_summary(*o.network) << ", " << o.network->size()
                          << " comparators" << detail << '\n';
                std::cout << serialize(*o.network) << '\n';
                if (!syn_out.empty()) {
                    write_file(syn_out, serialize(*o.network) + "\n");
                }
                break;
            case synthesis_verdict::no_network:
                std::cout << "UNSAT: no sorting network on " << st.channels << " channels of depth " << st.depth
                          << " extends the prefix" << detail << '\n';
                break;
            case synthesis_verdict::unknown:
                std::cout << "UNKNOWN: budget exhausted" << detail << '\n';
                break;
            }
            if (!syn_state_out.empty()) {
                write_file(syn_state_out, to_json(st).dump(2) + "\n");
            }
            emit_json(common, to_json(o));
            auto const v = o.verdict == synthesis_verdict::found
                               ? "found"
                               : (o.verdict == synthesis_verdict::no_network ? "unsat" : "unknown");
            return check_expect(common, v, {"found", "unsat", "unknown"});
        }

        if (*prove_cmd) {
            std::vector<prefix> prefixes;
            if (!prv_prefixes.empty()) {
                auto j = parse_json_file(prv_prefixes);
                if (!j.is_array()) {
                    throw parse_error(prv_prefixes + ": expected a JSON array of prefixes");
                }
                for (auto const& e : j) {
                    prefixes.push_back(prefix_from_json(e));
                }
            } else {
                auto style = prv_prefix.style;
                if (style == "auto") {
                    style = prv_n <= 4 ? "bz" : "enumerated";
                }
                if (style == "enumerated") {
                    prefixes = enumerate_two_layer_prefixes(prv_n);
                } else {
                    prv_prefix.style = style;
                    prefixes.push_back({make_prefix(prv_n, prv_prefix), style});
                }
            }
            auto cfg = make_synth(prv_n, prv_flags, prv_solver, common.seed);
            auto rep = prove_lower_bound(prv_n, prv_d, prefixes, cfg, prv_jobs);
            std::cout << report_table(rep);
            emit_json(common, to_json(rep));
            return check_expect(common, to_string(rep.overall), {"proved", "network-found", "inconclusive"});
        }

        if (*opt_cmd) {
            opt_cfg.seed = common.seed;
            auto pre = make_prefix(opt_n, opt_prefix);
            auto r = optimize_prefix_detailed({pre, opt_prefix.style}, opt_cfg);
            std::cout << "fitness " << r.initial_fitness << " -> " << r.best_fitness << '\n';
            std::cout << serialize(r.best.network) << '\n';
            if (!opt_out.empty()) {
                write_file(opt_out, to_json(r.best).dump() + "\n");
            }
            emit_json(common, {{"initial_fitness", r.initial_fitness},
                               {"best_fitness", r.best_fitness},
                               {"permutation", r.permutation},
                               {"prefix", to_json(r.best)},
                               {"config", to_json(opt_cfg)}});
            return exit_ok;
        }

        if (*green_cmd) {
            int t = green_t;
            if (t == 0) {
                if (green_n < 2 || (green_n & (green_n - 1)) != 0) {
                    throw argument_error("Green filter needs a power-of-two channel count");
                }
                t = std::countr_zero(static_cast<unsigned>(green_n));
            }
            auto p = green_filter(green_n, t);
            std::cout << serialize(p.network) << '\n';
            json j{{"prefix", to_json(p)}};
            if (green_outputs) {
                auto outs = output_set(p.network);
                json list = json::array();
                for (auto y : outs) {
                    std::cout << to_string(y) << '\n';
                    list.push_back(to_string(y));
                }
                std::cout << outs.size() << " distinct outputs\n";
                j["outputs"] = list;
            }
            if (!green_out.empty()) {
                write_file(green_out, to_json(p).dump() + "\n");
            }
            emit_json(common, j);
            return exit_ok;
        }

        if (*ws_cmd) {
            int n = ws_n;
            if (!ws_prefix.ref.empty()) {
                n = load_network(ws_prefix.ref).channels();
            } else if (ws_prefix.style.empty() || n < 1) {
                throw argument_error("window-sum needs --style with -n, or --prefix");
            }
            auto pre = make_prefix(n, ws_prefix);
            auto const sum = window_sum(pre);
            std::cout << sum << '\n';
            emit_json(common, {{"channels", n}, {"window_sum", sum}, {"distinct_outputs", output_set(pre).size()}});
            return exit_ok;
        }

        if (*enum_cmd) {
            auto ps = enumerate_two_layer_prefixes(enum_n, enum_limit);
            json list = json::array();
            for (auto const& p : ps) {
                list.push_back(to_json(p));
            }
            std::cout << ps.size() << " two-layer prefixes on " << enum_n << " channels\n";
            if (!enum_out.empty()) {
                write_file(enum_out, list.dump() + "\n");
            }
            emit_json(common, {{"channels", enum_n}, {"count", ps.size()}, {"prefixes", list}});
            return exit_ok;
        }

        if (*cat_cmd) {
            auto const& cat = catalog::builtin();
            if (cat_cmd->got_subcommand("list")) {
                json list = json::array();
                for (auto const& e : cat.entries()) {
                    std::cout << e.id << "  " << e.kind << "  " << e.claimed_channels << " channels, depth "
                              << e.claimed_depth << "  " << e.provenance << '\n';
                    list.push_back({{"id", e.id},
                                    {"kind", e.kind},
                                    {"channels", e.claimed_channels},
                                    {"depth", e.claimed_depth},
                                    {"provenance", e.provenance}});
                }
                emit_json(common, list);
            } else if (*cat_show) {
                auto const& e = cat.get(cat_id);
                std::cout << serialize(e.network) << '\n';
                emit_json(common, to_json(e.network));
            } else {
                auto b = cat.bounds(cat_n);
                std::cout << "n=" << cat_n << ": lower " << b.lower << ", upper " << b.upper << '\n';
                emit_json(common, {{"channels", cat_n}, {"lower", b.lower}, {"upper", b.upper}});
            }
            return exit_ok;
        }
    } catch (integrity_error const& e) {
        std::cerr << "integrity failure: " << e.what() << '\n';
        return exit_integrity;
    } catch (sortnet::error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (nlohmann::json::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_ok;
}

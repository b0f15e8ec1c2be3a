// Acceptance checks: one PASS/FAIL line per criterion. `--slow-only` runs the long n=9 and n=10 cases.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sortnet/sortnet.hpp>

using namespace sortnet;

namespace
{

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t) { return std::chrono::duration<double>(clock_type::now() - t).count(); }

int failures = 0;

void report(int id, std::string const& name, bool ok, std::string const& detail, double seconds)
{
    std::printf("%s %d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

void run(int id, std::string const& name, std::function<bool(std::ostringstream&)> const& body)
{
    auto const t = clock_type::now();
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (std::exception const& e) {
        detail << "exception: " << e.what();
    }
    report(id, name, ok, detail.str(), since(t));
}

// Outcomes collected from every loop run, for the soundness checks.
std::size_t found_checked = 0;
std::size_t unsat_checked = 0;
std::size_t outcome_violations = 0;

void audit(synthesis_outcome const& o, int n, int d, comparator_network const& prefix)
{
    if (o.verdict == synthesis_verdict::found) {
        ++found_checked;
        if (!o.network || !verify_sorting(*o.network).sorting || o.network->depth() != d) {
            ++outcome_violations;
        }
    } else if (o.verdict == synthesis_verdict::no_network) {
        ++unsat_checked;
        auto fresh = encode_problem(n, d, prefix, o.state.inputs, o.state.mode);
        if (solve(fresh).status != solve_status::unsat) {
            ++outcome_violations;
        }
    }
}

// Model of `inst` with the free layers fixed to those of `net`, if any.
std::optional<std::vector<bool>> solve_forced(cnf_instance const& inst, comparator_network const& net)
{
    auto f = inst.formula;
    auto const& vm = inst.vars;
    for (int k = vm.prefix_depth() + 1; k <= vm.depth(); ++k) {
        auto const& l = net[static_cast<std::size_t>(k - 1)];
        std::set<comparator> const present(l.begin(), l.end());
        for (int i = 1; i <= vm.channels(); ++i) {
            for (int j = i + 1; j <= vm.channels(); ++j) {
                int const g = vm.g(k, i, j);
                f.add_clause({present.contains(comparator{i, j}) ? g : -g});
            }
        }
    }
    return solve(f).model;
}

int const optimum[] = {0, 0, 1, 3, 3, 5, 5, 6, 6, 6, 7};

std::vector<prefix> proof_prefixes(int n, int d)
{
    if (d == 0) {
        return {prefix{comparator_network(n), "none"}};
    }
    if (n <= 4) {
        return {first_layer_bz(n)};
    }
    return enumerate_two_layer_prefixes(n);
}

bool prove_at(int n, int d, std::ostringstream& detail)
{
    auto const ps = proof_prefixes(n, d);
    auto rep = prove_lower_bound(n, d, ps);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto const& e = rep.entries[i];
        synthesis_outcome o;
        o.verdict = e.verdict;
        o.network = e.network;
        o.state.inputs = e.final_inputs;
        o.state.mode = rep.mode;
        audit(o, n, d, ps[i].network);
    }
    detail << "n=" << n << " d=" << d << ": " << to_string(rep.overall) << " over " << ps.size() << " prefixes";
    return rep.overall == bound_verdict::proved;
}

bool synth_at(int n, int d, std::ostringstream& detail)
{
    auto const pre = first_layer_bz(n).network;
    auto o = synthesize(n, d, pre);
    audit(o, n, d, pre);
    detail << "n=" << n << " d=" << d << ": " << to_string(o.verdict) << " after " << o.inputs_used << " inputs";
    return o.verdict == synthesis_verdict::found && o.network && verify_sorting(*o.network).sorting;
}

void criterion_1()
{
    run(1, "catalog verification", [](std::ostringstream& detail) {
        bool ok = true;
        for (char const* id : {"s17d10-left", "s17d10-right", "s20d11"}) {
            auto const& e = catalog::builtin().get(id);
            auto const t = clock_type::now();
            auto const v = verify_sorting(e.network);
            auto const s = since(t);
            bool const good = v.sorting && e.network.depth() == e.claimed_depth && s < 10.0;
            ok &= good;
            detail << id << (good ? " ok" : " BAD") << " [n=" << e.network.channels() << ", depth "
                   << e.network.depth() << ", " << s << "s] ";
        }
        return ok;
    });
}

void criterion_2()
{
    run(2, "first-layer window sums", [](std::ostringstream& detail) {
        std::uint64_t const pb[] = {0,    5,    12,    44,    84,    233,   408,   1016,
                                    1704, 4013, 6564, 14948, 24060, 53585, 85296, 186992};
        std::uint64_t const bz[] = {0,    4,    10,    36,    72,    196,   358,   876,
                                    1524, 3532, 5962, 13380, 22128, 48628, 79246, 171612};
        int bad = 0;
        for (int n = 2; n <= 17; ++n) {
            auto const i = static_cast<std::size_t>(n - 2);
            bad += window_sum(first_layer_pb(n).network) != pb[i];
            bad += window_sum(first_layer_bz(n).network) != bz[i];
        }
        detail << bad << " mismatches over n=2..17; n=17 pb " << window_sum(first_layer_pb(17).network) << ", bz "
               << window_sum(first_layer_bz(17).network);
        return bad == 0;
    });
}

void criterion_3()
{
    run(3, "green filter outputs", [](std::ostringstream& detail) {
        auto const four = output_set(green_filter(4, 2).network);
        auto const eight = output_set(green_filter(8, 3).network);
        std::set<std::string> got;
        for (auto y : four) {
            got.insert(to_string(y));
        }
        std::set<std::string> const expect{"0000", "0001", "0011", "0101", "0111", "1111"};
        detail << "|n=4| " << four.size() << ", |n=8| " << eight.size();
        return four.size() == 6 && eight.size() == 20 && got == expect;
    });
}

void criterion_4()
{
    run(4, "optimal depths n=2..8", [](std::ostringstream& detail) {
        bool ok = true;
        for (int n = 2; n <= 8; ++n) {
            std::ostringstream s, p;
            bool const found = synth_at(n, optimum[n], s);
            bool const proved = prove_at(n, optimum[n] - 1, p);
            ok &= found && proved;
            detail << s.str() << "; " << p.str() << (n < 8 ? " | " : "");
        }
        return ok;
    });
}

void criterion_4_slow()
{
    run(4, "optimal depths n=9,10 (slow)", [](std::ostringstream& detail) {
        std::ostringstream p, s;
        bool const proved = prove_at(9, 6, p);
        bool const found = synth_at(10, 7, s);
        detail << p.str() << " | " << s.str();
        return proved && found;
    });
}

void criterion_5()
{
    run(5, "improved encoding is smaller", [](std::ostringstream& detail) {
        int const n = 10;
        auto const pre = first_layer_bz(n).network;
        auto const inputs = initial_inputs(n, pre, 200, input_strategy{input_strategy::kind::random, 7});
        auto sorts_all = [&](comparator_network const& net) {
            for (auto x : inputs) {
                if (!is_sorted(apply_network(net, x))) {
                    return false;
                }
            }
            return true;
        };
        bool ok = true;
        // Depth 6 is the measured instance; depth 7 on the same inputs exercises decoding.
        for (int d : {6, 7}) {
            auto const orig = encode_problem(n, d, pre, inputs, encoding_mode::original);
            auto const impr = encode_problem(n, d, pre, inputs, encoding_mode::improved);
            auto const ro = solve(orig);
            auto const ri = solve(impr);
            detail << "d=" << d << ": clauses " << orig.stats.clauses << " -> " << impr.stats.clauses << ", literals "
                   << orig.stats.literals << " -> " << impr.stats.literals << ", " << to_string(ro.status) << "/"
                   << to_string(ri.status);
            ok &= impr.stats.clauses < orig.stats.clauses && impr.stats.literals < orig.stats.literals &&
                  ro.status == ri.status && ro.status != solve_status::unknown;
            if (ok && ro.status == solve_status::sat) {
                // Each decoded network must be a model of the other encoding and decode back to itself.
                auto const no = decode_model(orig, *ro.model);
                auto const ni = decode_model(impr, *ri.model);
                auto const no_in_impr = solve_forced(impr, no);
                auto const ni_in_orig = solve_forced(orig, ni);
                bool const cross = no_in_impr && ni_in_orig && decode_model(impr, *no_in_impr) == no &&
                                   decode_model(orig, *ni_in_orig) == ni;
                bool const same_verdicts =
                    cross && verify_sorting(no).sorting == verify_sorting(decode_model(impr, *no_in_impr)).sorting &&
                    verify_sorting(ni).sorting == verify_sorting(decode_model(orig, *ni_in_orig)).sorting;
                detail << ", decoded networks cross-accepted " << cross;
                ok &= cross && same_verdicts && sorts_all(no) && sorts_all(ni);
            }
            detail << (d == 6 ? "; " : "");
        }
        return ok;
    });
}

// Bit-parallel truth table over at most 20 variables.
bool oracle_sat(cnf const& f)
{
    int const n = f.num_vars();
    static constexpr std::uint64_t patterns[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                                  0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    std::uint64_t const total = std::uint64_t{1} << n;
    std::uint64_t const valid = total >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << total) - 1);
    std::vector<std::uint64_t> w(static_cast<std::size_t>(n) + 1);
    for (std::uint64_t base = 0; base < total; base += 64) {
        for (int v = 1; v <= n; ++v) {
            int const b = v - 1;
            w[static_cast<std::size_t>(v)] = b < 6 ? patterns[b] : (((base >> b) & 1u) ? ~std::uint64_t{0} : 0);
        }
        std::uint64_t all = valid;
        for (std::size_t i = 0; i < f.num_clauses() && all != 0; ++i) {
            std::uint64_t any = 0;
            for (int l : f.clause(i)) {
                auto const x = w[static_cast<std::size_t>(std::abs(l))];
                any |= l > 0 ? x : ~x;
            }
            all &= any;
        }
        if (all != 0) {
            return true;
        }
    }
    return false;
}

void criterion_6()
{
    run(6, "soundness properties", [](std::ostringstream& detail) {
        std::mt19937_64 rng(20241014);
        int equisat_bad = 0;
        for (int t = 0; t < 500; ++t) {
            int const n = 2 + static_cast<int>(rng() % 4);
            int const d = 1 + static_cast<int>(rng() % 3);
            comparator_network pre(n);
            if (rng() % 2 == 0) {
                pre = first_layer_bz(n).network;
            }
            std::vector<bit_vector> xs;
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
                if (rng() % 3 == 0) {
                    xs.emplace_back(x, n);
                }
            }
            auto const a = solve(encode_problem(n, d, pre, xs, encoding_mode::original)).status;
            auto const b = solve(encode_problem(n, d, pre, xs, encoding_mode::improved)).status;
            equisat_bad += a != b || a == solve_status::unknown;
        }

        int oracle_bad = 0;
        for (int t = 0; t < 1000; ++t) {
            int const vars = 1 + static_cast<int>(rng() % 20);
            int const clauses = 1 + static_cast<int>(vars * (3.0 + static_cast<double>(rng() % 300) / 100.0));
            cnf f;
            f.reserve_vars(vars);
            int const max_len = 1 + static_cast<int>(rng() % 5);
            for (int c = 0; c < clauses; ++c) {
                std::vector<int> cl;
                int const len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
                for (int k = 0; k < len; ++k) {
                    int const v = 1 + static_cast<int>(rng() % static_cast<unsigned>(vars));
                    cl.push_back(rng() & 1u ? v : -v);
                }
                f.add_clause(cl);
            }
            auto const r = solve(f);
            bool const expect = oracle_sat(f);
            oracle_bad += (r.status == solve_status::sat) != expect || r.status == solve_status::unknown ||
                          (r.model && !f.satisfied_by(*r.model));
        }

        // Extra loop runs besides those of criterion 4, covering both modes and batch sizes.
        for (int n = 3; n <= 6; ++n) {
            for (auto mode : {encoding_mode::original, encoding_mode::improved}) {
                for (std::size_t batch : {1u, 3u}) {
                    synth_config cfg;
                    cfg.mode = mode;
                    cfg.batch = batch;
                    auto const pre = first_layer_pb(n).network;
                    for (int d : {optimum[n] - 1, optimum[n]}) {
                        audit(synthesize(n, d, pre, cfg), n, d, pre);
                    }
                }
            }
        }
        detail << "(a) " << equisat_bad << "/500 (b) " << oracle_bad << "/1000 (c) " << found_checked
               << " found (d) " << unsat_checked << " unsat, " << outcome_violations << " violations";
        return equisat_bad == 0 && oracle_bad == 0 && outcome_violations == 0 && found_checked > 0 &&
               unsat_checked > 0;
    });
}

void criterion_7()
{
    run(7, "loop economy n=10 d=7", [](std::ostringstream& detail) {
        auto const pre = first_layer_pb(10).network;
        auto o = synthesize(10, 7, pre);
        audit(o, 10, 7, pre);
        detail << to_string(o.verdict) << " with " << o.inputs_used << " inputs in " << o.iterations << " iterations";
        return o.verdict == synthesis_verdict::found && verify_sorting(*o.network).sorting && o.inputs_used < 300;
    });
}

void criterion_8()
{
    run(8, "prefix optimization", [](std::ostringstream& detail) {
        ea_config cfg;
        cfg.seed = 1;
        auto const r6 = optimize_prefix_detailed(first_layer_pb(6), cfg);
        auto const r8 = optimize_prefix_detailed(first_layer_pb(8), cfg);
        auto const f6 = window_sum(r6.best.network);
        auto const f8 = window_sum(r8.best.network);
        detail << "n=6 " << r6.initial_fitness << " -> " << r6.best_fitness << " (window sum " << f6 << "), n=8 "
               << r8.initial_fitness << " -> " << r8.best_fitness << " (window sum " << f8 << ")";
        return r6.best_fitness <= 72 && r8.best_fitness <= 358 && f6 <= 72 && f8 <= 358;
    });
}

} // namespace

int main(int argc, char** argv)
{
    bool const slow_only = argc > 1 && std::strcmp(argv[1], "--slow-only") == 0;
    if (argc > 1 && !slow_only) {
        std::fprintf(stderr, "usage: acceptance [--slow-only]\n");
        return 2;
    }
    if (slow_only) {
        criterion_4_slow();
    } else {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_7();
        criterion_6();
        criterion_8();
    }
    return failures == 0 ? 0 : 1;
}

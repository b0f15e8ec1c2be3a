#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <sortnet/cnf.hpp>
#include <sortnet/encoder.hpp>
#include <sortnet/solver.hpp>

using namespace sortnet;

namespace
{

// Truth-table oracle, 64 assignments per word; stops at the first satisfying block.
std::optional<std::uint64_t> oracle_first_model(cnf const& f)
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
            return base + static_cast<std::uint64_t>(std::countr_zero(all));
        }
    }
    return std::nullopt;
}

std::uint64_t oracle_count(cnf const& f)
{
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << f.num_vars()); ++a) {
        bool ok = true;
        for (std::size_t i = 0; i < f.num_clauses() && ok; ++i) {
            bool any = false;
            for (int l : f.clause(i)) {
                any |= (((a >> (std::abs(l) - 1)) & 1u) != 0) == (l > 0);
            }
            ok = any;
        }
        count += ok;
    }
    return count;
}

cnf random_cnf(std::mt19937_64& rng, int vars, int clauses, int max_len)
{
    cnf f;
    f.reserve_vars(vars);
    for (int c = 0; c < clauses; ++c) {
        int const len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
        std::vector<int> cl;
        for (int k = 0; k < len; ++k) {
            int const v = 1 + static_cast<int>(rng() % static_cast<unsigned>(vars));
            cl.push_back(rng() & 1u ? v : -v);
        }
        f.add_clause(cl);
    }
    return f;
}

// Pigeons p into holes p-1: unsatisfiable.
cnf pigeonhole(int p)
{
    int const h = p - 1;
    cnf f;
    f.reserve_vars(p * h);
    auto x = [h](int i, int j) { return i * h + j + 1; };
    for (int i = 0; i < p; ++i) {
        std::vector<int> c;
        for (int j = 0; j < h; ++j) {
            c.push_back(x(i, j));
        }
        f.add_clause(c);
    }
    for (int j = 0; j < h; ++j) {
        for (int a = 0; a < p; ++a) {
            for (int b = a + 1; b < p; ++b) {
                f.add_clause({-x(a, j), -x(b, j)});
            }
        }
    }
    return f;
}

} // namespace

TEST(Solver, Examples)
{
    cnf a;
    a.reserve_vars(1);
    a.add_clause({1});
    a.add_clause({-1});
    EXPECT_EQ(solve(a).status, solve_status::unsat);

    cnf b;
    b.reserve_vars(2);
    b.add_clause({1, 2});
    b.add_clause({-1});
    auto r = solve(b);
    ASSERT_EQ(r.status, solve_status::sat);
    EXPECT_TRUE((*r.model)[2]);
    EXPECT_FALSE((*r.model)[1]);
}

TEST(Solver, EmptyFormulaAndEmptyClause)
{
    EXPECT_EQ(solve(cnf{}).status, solve_status::sat);
    cnf f;
    f.reserve_vars(3);
    f.add_clause(std::span<int const>{});
    EXPECT_EQ(solve(f).status, solve_status::unsat);
}

TEST(Solver, FourChannelsDepthTwoIsUnsat)
{
    std::vector<bit_vector> xs;
    for (std::uint64_t x = 0; x < 16; ++x) {
        xs.emplace_back(x, 4);
    }
    auto inst = encode_problem(4, 2, comparator_network(4), xs, encoding_mode::improved);
    EXPECT_EQ(solve(inst).status, solve_status::unsat);
}

TEST(Solver, AgreesWithTruthTableOracle)
{
    std::mt19937_64 rng(12345);
    int sat = 0;
    for (int t = 0; t < 1000; ++t) {
        int const vars = 1 + static_cast<int>(rng() % 20);
        // Spread across the satisfiability threshold, with mixed clause lengths.
        int const clauses = static_cast<int>(vars * (1.5 + static_cast<double>(rng() % 350) / 100.0)) + 1;
        auto f = random_cnf(rng, vars, clauses, 1 + static_cast<int>(rng() % 5));
        auto expect = oracle_first_model(f);
        auto r = solve(f);
        ASSERT_NE(r.status, solve_status::unknown);
        ASSERT_EQ(r.status == solve_status::sat, expect.has_value()) << "instance " << t;
        if (r.model) {
            EXPECT_TRUE(f.satisfied_by(*r.model));
            ++sat;
        }
    }
    EXPECT_GT(sat, 100);
    EXPECT_LT(sat, 900);
}

TEST(Solver, ProbingAgreesWithOracle)
{
    std::mt19937_64 rng(99);
    solver_options opts;
    opts.probing = true;
    for (int v = 1; v <= 20; ++v) {
        opts.probe_vars.push_back(v);
    }
    for (int t = 0; t < 200; ++t) {
        int const vars = 5 + static_cast<int>(rng() % 16);
        auto f = random_cnf(rng, vars, static_cast<int>(vars * 4.2), 3);
        auto o = opts;
        o.probe_vars.resize(static_cast<std::size_t>(vars));
        auto r = solve(f, {}, o);
        ASSERT_EQ(r.status == solve_status::sat, oracle_first_model(f).has_value()) << "instance " << t;
    }
}

TEST(Solver, IncrementalModelEnumerationMatchesCount)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        int const vars = 3 + static_cast<int>(rng() % 8);
        auto f = random_cnf(rng, vars, static_cast<int>(vars * 2.5), 3);
        cdcl_solver s;
        s.add_formula(f);
        std::uint64_t models = 0;
        while (s.solve() == solve_status::sat) {
            ++models;
            ASSERT_LE(models, std::uint64_t{1} << vars);
            std::vector<int> block;
            for (int v = 1; v <= vars; ++v) {
                block.push_back(s.model()[static_cast<std::size_t>(v)] ? -v : v);
            }
            s.add_clause(block);
        }
        EXPECT_EQ(models, oracle_count(f)) << "instance " << t;
    }
}

TEST(Solver, PigeonholeExercisesLearntClauseDeletion)
{
    auto r = solve(pigeonhole(8));
    EXPECT_EQ(r.status, solve_status::unsat);
    EXPECT_GT(r.stats.conflicts, 1000u);
}

TEST(Solver, LargeRandomSatModelsAreChecked)
{
    std::mt19937_64 rng(77);
    for (int t = 0; t < 5; ++t) {
        auto f = random_cnf(rng, 300, 1100, 3);
        auto r = solve(f);
        ASSERT_NE(r.status, solve_status::unknown);
        if (r.model) {
            EXPECT_TRUE(f.satisfied_by(*r.model));
        }
    }
}

TEST(Solver, BudgetGivesUnknown)
{
    auto r = solve(pigeonhole(10), solve_budget{5, std::nullopt});
    EXPECT_EQ(r.status, solve_status::unknown);
    EXPECT_FALSE(r.model.has_value());
    auto t = solve(pigeonhole(11), solve_budget{std::nullopt, 0.05});
    EXPECT_EQ(t.status, solve_status::unknown);
}

TEST(Solver, DeterministicWithSeed)
{
    std::mt19937_64 rng(31);
    auto f = random_cnf(rng, 120, 480, 3);
    solver_options opts;
    opts.seed = 4;
    opts.random_freq = 0.05;
    auto a = solve(f, {}, opts);
    auto b = solve(f, {}, opts);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.stats.conflicts, b.stats.conflicts);
}

TEST(Cnf, ClauseValidation)
{
    cnf f;
    f.reserve_vars(2);
    EXPECT_THROW(f.add_clause({1, 0}), argument_error);
    EXPECT_THROW(f.add_clause({3}), argument_error);
    cdcl_solver s;
    EXPECT_THROW(s.add_clause({0}), argument_error);
}

TEST(Dimacs, ParseAndErrors)
{
    auto f = parse_dimacs("c comment\np cnf 3 2\n1 -2\n 3 0 -1 0\n");
    ASSERT_EQ(f.num_clauses(), 2u);
    EXPECT_EQ(f.clause(0).size(), 3u);
    EXPECT_EQ(f.num_vars(), 3);
    EXPECT_THROW(parse_dimacs("1 2 0\n"), parse_error);
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 3 0\n"), parse_error);
    EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 2 0\n"), parse_error);
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 x 0\n"), parse_error);
    EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 0\n"), parse_error);
}

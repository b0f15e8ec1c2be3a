#pragma once

#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace sortnet
{

/// Clause list over variables 1..num_vars, literals in DIMACS convention
/// (v or -v). Clauses live back to back in one literal array.
class cnf
{
public:
    int num_vars() const { return num_vars_; }
    std::size_t num_clauses() const { return starts_.size(); }
    std::size_t num_literals() const { return lits_.size(); }

    int new_var() { return ++num_vars_; }

    /// Grows the variable count; never shrinks it.
    void reserve_vars(int n)
    {
        if (n > num_vars_) {
            num_vars_ = n;
        }
    }

    void add_clause(std::span<int const> clause)
    {
        for (int l : clause) {
            if (l == 0) {
                throw argument_error("zero literal in clause");
            }
            if (std::abs(l) > num_vars_) {
                throw argument_error("literal " + std::to_string(l) + " refers to an undeclared variable");
            }
        }
        starts_.push_back(lits_.size());
        lits_.insert(lits_.end(), clause.begin(), clause.end());
    }

    void add_clause(std::initializer_list<int> clause) { add_clause(std::span<int const>(clause.begin(), clause.size())); }

    std::span<int const> clause(std::size_t i) const
    {
        auto const begin = starts_[i];
        auto const end = i + 1 < starts_.size() ? starts_[i + 1] : lits_.size();
        return {lits_.data() + begin, end - begin};
    }

    bool has_empty_clause() const
    {
        for (std::size_t i = 0; i < num_clauses(); ++i) {
            if (clause(i).empty()) {
                return true;
            }
        }
        return false;
    }

    /// `model[v]` is the value of variable v; index 0 is unused.
    bool satisfied_by(std::vector<bool> const& model) const
    {
        if (model.size() < static_cast<std::size_t>(num_vars_) + 1) {
            return false;
        }
        for (std::size_t i = 0; i < num_clauses(); ++i) {
            bool sat = false;
            for (int l : clause(i)) {
                if (model[static_cast<std::size_t>(std::abs(l))] == (l > 0)) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                return false;
            }
        }
        return true;
    }

private:
    int num_vars_ = 0;
    std::vector<int> lits_;
    std::vector<std::size_t> starts_;
};

inline void write_dimacs(cnf const& f, std::ostream& os)
{
    os << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
    for (std::size_t i = 0; i < f.num_clauses(); ++i) {
        for (int l : f.clause(i)) {
            os << l << ' ';
        }
        os << "0\n";
    }
}

inline std::string write_dimacs(cnf const& f)
{
    std::ostringstream os;
    write_dimacs(f, os);
    return os.str();
}

/// Accepts comment lines ('c'), one header, and clauses that may span lines.
inline cnf parse_dimacs(std::istream& is)
{
    cnf f;
    std::string line;
    bool header = false;
    long long declared_clauses = 0;
    std::vector<int> cur;
    while (std::getline(is, line)) {
        std::size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == 'c' || line[p] == '%') {
            continue;
        }
        if (line[p] == 'p') {
            std::istringstream hs(line.substr(p));
            std::string tag, fmt;
            long long vars = -1;
            if (!(hs >> tag >> fmt >> vars >> declared_clauses) || fmt != "cnf" || vars < 0 || declared_clauses < 0 ||
                header) {
                throw parse_error("bad DIMACS header: " + line);
            }
            header = true;
            f.reserve_vars(static_cast<int>(vars));
            continue;
        }
        if (!header) {
            throw parse_error("DIMACS clause before header");
        }
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            long long v = std::strtoll(tok.c_str(), &end, 10);
            if (end == tok.c_str() || *end != '\0') {
                throw parse_error("bad DIMACS literal: " + tok);
            }
            if (v == 0) {
                f.add_clause(cur);
                cur.clear();
            } else {
                if (std::llabs(v) > f.num_vars()) {
                    throw parse_error("DIMACS literal " + tok + " exceeds the declared variable count");
                }
                cur.push_back(static_cast<int>(v));
            }
        }
    }
    if (!header) {
        throw parse_error("missing DIMACS header");
    }
    if (!cur.empty()) {
        f.add_clause(cur);
    }
    if (static_cast<long long>(f.num_clauses()) != declared_clauses) {
        throw parse_error("DIMACS header declares " + std::to_string(declared_clauses) + " clauses, found " +
                          std::to_string(f.num_clauses()));
    }
    return f;
}

inline cnf parse_dimacs(std::string const& text)
{
    std::istringstream is(text);
    return parse_dimacs(is);
}

} // namespace sortnet

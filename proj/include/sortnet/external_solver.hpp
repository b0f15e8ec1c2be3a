#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cnf.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "solver.hpp"

namespace sortnet
{

/// Environment variable naming the default external solver command.
inline constexpr char const* solver_env_var = "SORTNET_SOLVER";

namespace detail
{

inline std::string shell_quote(std::string const& s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

inline bool executable_exists(std::string const& program)
{
    if (program.find('/') != std::string::npos) {
        return ::access(program.c_str(), X_OK) == 0;
    }
    char const* path = std::getenv("PATH");
    if (path == nullptr) {
        return false;
    }
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        auto const candidate = (dir.empty() ? std::string(".") : dir) + "/" + program;
        if (::access(candidate.c_str(), X_OK) == 0) {
            return true;
        }
    }
    return false;
}

/// Removes the file when it goes out of scope.
class temp_file
{
public:
    explicit temp_file(std::string const& suffix_hint)
    {
        char const* dir = std::getenv("TMPDIR");
        std::string templ = std::string(dir ? dir : "/tmp") + "/sortnet-" + suffix_hint + "-XXXXXX";
        std::vector<char> buf(templ.begin(), templ.end());
        buf.push_back('\0');
        int fd = ::mkstemp(buf.data());
        if (fd < 0) {
            throw config_error("cannot create temporary file in " + std::string(dir ? dir : "/tmp"));
        }
        ::close(fd);
        path_ = buf.data();
    }
    temp_file(temp_file const&) = delete;
    temp_file& operator=(temp_file const&) = delete;
    ~temp_file() { std::remove(path_.c_str()); }

    std::string const& path() const { return path_; }

private:
    std::string path_;
};

} // namespace detail

/// Parses SAT-competition output ("s ..." status line, "v ..." model lines).
inline solve_result parse_competition_output(std::string const& text, int num_vars)
{
    solve_result r;
    bool have_status = false;
    std::vector<bool> model(static_cast<std::size_t>(num_vars) + 1, false);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("s ", 0) == 0) {
            auto const st = line.substr(2);
            if (st.rfind("SATISFIABLE", 0) == 0) {
                r.status = solve_status::sat;
            } else if (st.rfind("UNSATISFIABLE", 0) == 0) {
                r.status = solve_status::unsat;
            } else if (st.rfind("UNKNOWN", 0) == 0 || st.rfind("INDETERMINATE", 0) == 0) {
                r.status = solve_status::unknown;
            } else {
                throw parse_error("unrecognized solver status line: " + line);
            }
            have_status = true;
        } else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream ls(line.substr(1));
            long long lit = 0;
            while (ls >> lit) {
                if (lit == 0) {
                    continue;
                }
                auto const v = std::llabs(lit);
                if (v > num_vars) {
                    throw parse_error("solver model mentions variable " + std::to_string(v) +
                                      " beyond the instance's " + std::to_string(num_vars));
                }
                model[static_cast<std::size_t>(v)] = lit > 0;
            }
        }
    }
    if (!have_status) {
        throw parse_error("solver output has no status line");
    }
    if (r.status == solve_status::sat) {
        r.model = std::move(model);
    }
    return r;
}

/// Runs `command <dimacs-file>` and parses its output. The model is checked
/// against the formula; a bad model raises integrity_error.
inline solve_result solve_external(cnf const& f, std::string const& command)
{
    if (command.empty()) {
        throw config_error(std::string("no external solver command given (set ") + solver_env_var + ")");
    }
    std::istringstream cs(command);
    std::string program;
    cs >> program;
    if (!detail::executable_exists(program)) {
        throw config_error("external solver executable not found: " + program);
    }
    detail::temp_file cnf_file("cnf");
    {
        std::ofstream os(cnf_file.path());
        write_dimacs(f, os);
        if (!os) {
            throw config_error("cannot write " + cnf_file.path());
        }
    }
    auto const start = std::chrono::steady_clock::now();
    auto const full = command + " " + detail::shell_quote(cnf_file.path()) + " 2>/dev/null";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (pipe == nullptr) {
        throw config_error("cannot start external solver: " + command);
    }
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, got);
    }
    int const status = ::pclose(pipe);
    if (status == -1 || !WIFEXITED(status)) {
        throw error("external solver terminated abnormally: " + command);
    }
    int const code = WEXITSTATUS(status);
    if (code != 0 && code != 10 && code != 20) {
        throw error("external solver failed with exit code " + std::to_string(code) + ": " + command);
    }
    auto r = parse_competition_output(out, f.num_vars());
    r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.status == solve_status::sat && !f.satisfied_by(*r.model)) {
        throw integrity_error("external solver model does not satisfy the formula");
    }
    return r;
}

inline solve_result solve_external(cnf_instance const& inst, std::string const& command)
{
    return solve_external(inst.formula, command);
}

/// Prints a result in SAT-competition format.
inline std::string competition_output(solve_result const& r)
{
    std::ostringstream os;
    switch (r.status) {
    case solve_status::sat: os << "s SATISFIABLE\n"; break;
    case solve_status::unsat: os << "s UNSATISFIABLE\n"; break;
    case solve_status::unknown: os << "s UNKNOWN\n"; break;
    }
    if (r.model) {
        auto const& m = *r.model;
        std::string line = "v";
        for (std::size_t v = 1; v < m.size(); ++v) {
            auto tok = " " + std::string(m[v] ? "" : "-") + std::to_string(v);
            if (line.size() + tok.size() > 78) {
                os << line << '\n';
                line = "v";
            }
            line += tok;
        }
        os << line << " 0\n";
    }
    return os.str();
}

} // namespace sortnet

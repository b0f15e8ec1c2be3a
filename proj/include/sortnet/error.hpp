#pragma once

#include <stdexcept>
#include <string>

namespace sortnet
{

/// Base class for every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad width, bad permutation, ...).
class argument_error : public error
{
public:
    using error::error;
};

/// A problem exceeds a configured size limit (exhaustive or enumeration limit).
class limit_error : public error
{
public:
    using error::error;
};

/// A document (JSON, DIMACS, solver output) could not be parsed.
class parse_error : public error
{
public:
    using error::error;
};

/// External tooling is missing or misconfigured.
class config_error : public error
{
public:
    using error::error;
};

/// A result failed an internal self-check (e.g. a model that does not satisfy its formula).
class integrity_error : public error
{
public:
    using error::error;
};

} // namespace sortnet

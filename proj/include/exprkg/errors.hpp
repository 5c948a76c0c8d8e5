#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exprkg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration or a request that does not fit the supplied inputs.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A triple or value that violates a structural invariant (e.g. a literal subject).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Lookup of something that does not exist (OOV token, unknown entity, missing patient).
class LookupError : public Error {
public:
    using Error::Error;
};

/// A quantity that is mathematically undefined for the given input.
class UndefinedError : public Error {
public:
    using Error::Error;
};

} // namespace exprkg

#pragma once

#include <stdexcept>
#include <string>

namespace gridshed {

/// Malformed file content (bad row, unparseable field). Carries a location.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally wrong input (bad header, non-hourly spacing, wrong column count).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Well-formed input that violates a domain invariant (negative energy, count = 0).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller passed arguments outside an operation's contract.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested file is missing or unreadable.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridshed

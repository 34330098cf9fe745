#pragma once

#include <stdexcept>
#include <string>

namespace crfid {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad command-line usage or incompatible option combinations (exit code 1).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

/// Malformed input text or binary stream (exit code 2).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// Structurally valid data violating a contract (exit code 2).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Numerical failure: divergence, unusable reference, non-finite values (exit code 3).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace crfid

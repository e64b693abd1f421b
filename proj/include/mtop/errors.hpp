#pragma once

#include <stdexcept>
#include <string>

namespace mtop {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the map-DSL parser; carries the source position of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int col)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
          line(line), col(col) {}
    int line;
    int col;
};

/// Raised when a map expression violates a structural invariant.
/// `path` locates the offending subexpression, e.g. "/compose.outer/entries[2]".
class ValidateError : public Error {
public:
    ValidateError(const std::string& what, std::string path_)
        : Error(what + " at " + path_), path(std::move(path_)) {}
    std::string path;
};

/// Raised when extended arithmetic hits an undefined product, e.g. a geometric
/// mean whose support mixes 0 and +inf. Never silently resolved.
class IndeterminateError : public Error {
public:
    using Error::Error;
};

/// Dimension disagreement between runtime arguments (not expression structure).
class DimensionError : public Error {
public:
    using Error::Error;
};

} // namespace mtop

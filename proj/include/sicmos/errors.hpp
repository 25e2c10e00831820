#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sicmos {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs outside the domain of an operation (bad ranges, invalid bias, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// f(lo) and f(hi) share a sign.
class NoBracket : public Error {
public:
    using Error::Error;
};

/// A function under evaluation returned NaN or infinity.
class NonFinite : public Error {
public:
    using Error::Error;
};

/// An implicit model equation could not be solved.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// Malformed CSV content; carries the 1-based line and column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// The mandatory CSV header is missing or differs from the expected one.
class UnitHeaderError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Model card or config file violates its schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace sicmos

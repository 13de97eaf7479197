#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsefs {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input parsed correctly but holds values the library refuses (NaN, Inf).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Binary file header or payload is malformed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Truncated binary payload.
class TruncationError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Text input could not be parsed. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public FormatError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A fixed-step proximal iteration increased the objective.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t iteration);

    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace sparsefs

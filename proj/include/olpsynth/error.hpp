#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace olpsynth {

/// Base of every error raised by the library. The CLI maps these to exit
/// status 2 (bad input); anything else is an internal error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network description. Carries the 1-based source line (0 when the
/// problem is structural rather than tied to a line).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bad magic, version, truncation or count mismatch in a binary file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Tensor shapes or layouts that do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Execution plan inconsistent with itself or with the model.
class PlanError : public Error {
public:
    using Error::Error;
};

}  // namespace olpsynth

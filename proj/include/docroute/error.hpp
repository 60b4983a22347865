#ifndef DOCROUTE_ERROR_HPP_
#define DOCROUTE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace docroute {

/// Base of every error raised by the library. Callers that only need a
/// message can catch std::runtime_error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (corpus records, resource files, config files).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A precondition on an argument failed.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Shapes of two operands disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace docroute

#endif  // DOCROUTE_ERROR_HPP_

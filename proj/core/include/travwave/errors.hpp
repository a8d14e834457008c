#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace travwave {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression or problem-file syntax error, with the byte offset of the
/// offending token in the source text.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Problem file violates the schema (unknown key, wrong type, bad breakpoints...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Expression evaluation left the real domain (ln of nonpositive, 0^negative,
/// division by zero, non-finite intermediate). Never propagated as NaN.
class EvalDomainError : public Error {
public:
    EvalDomainError(const std::string& what, double t)
        : Error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

/// Hard numerical failure (step-size underflow, violated analytic bracket,
/// quadrature breakdown). CLI maps these to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Forward and backward shooting disagreed in a way the no-crossing property
/// forbids; signals a tolerance failure, reported with both witnesses.
class AmbiguousClassificationError : public NumericError {
public:
    AmbiguousClassificationError(const std::string& what, double forwardExit, double backwardExit)
        : NumericError(what), forwardExit_(forwardExit), backwardExit_(backwardExit) {}
    double forwardExit() const { return forwardExit_; }
    double backwardExit() const { return backwardExit_; }

private:
    double forwardExit_;
    double backwardExit_;
};

} // namespace travwave

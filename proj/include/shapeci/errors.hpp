#pragma once

#include <stdexcept>
#include <string>

namespace shapeci {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix that must be positive definite is singular or too badly
/// conditioned (smallest/largest eigenvalue ratio at or below 1e-12).
class NearSingular : public Error {
public:
    using Error::Error;
};

/// An iterative kernel hit its iteration cap.
class IterationLimit : public Error {
public:
    using Error::Error;
};

/// Arguments outside an operation's domain (shape mismatch, point outside
/// the sieve window, degenerate kink, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed user input (CSV data, LP problem text). Carries a line number
/// when one is known.
class InputError : public Error {
public:
    InputError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration file or option.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace shapeci

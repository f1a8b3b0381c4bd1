#pragma once

#include <stdexcept>
#include <string>

namespace sklpca {

/// Base of every error raised by the library. `is_numerical()` separates
/// numerical breakdowns (CLI exit code 2) from input/validation errors (exit code 1).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual bool is_numerical() const noexcept { return false; }
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data that makes the requested quantity meaningless (identical rows, constant outcome).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

/// Subject id not present in a fitted model.
class UnknownSubjectError : public Error {
public:
    using Error::Error;
};

/// Feature screening selected nothing; callers may proceed without screening.
class ScreeningEmptyError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::string diagnostics = {})
        : Error(diagnostics.empty() ? what : what + " [" + diagnostics + "]"),
          diagnostics_(std::move(diagnostics)) {}
    [[nodiscard]] bool is_numerical() const noexcept override { return true; }
    [[nodiscard]] const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

} // namespace sklpca

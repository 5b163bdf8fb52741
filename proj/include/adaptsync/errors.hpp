#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace adaptsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sizes of matrices or stacked state vectors do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A coupling matrix lacks a required graph property (irreducibility, A1/A2 shape).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A spectral computation found the wrong null-space rank or an unexpected sign.
class SpectrumError : public Error {
public:
    using Error::Error;
};

/// A precondition on a scalar argument does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Invalid experiment or scheme configuration. `path` names the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Text input could not be parsed; `line` is 1-based (0 when unknown).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace adaptsync

#pragma once

#include <stdexcept>
#include <string>

namespace dairyq {

/// Base for every error raised by the library. `kind()` is a short stable
/// token used by the CLI for machine-parsable error lines.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Invalid or inconsistent input data (CSV rows, series shape, tariff).
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data", message) {}
};

/// Stepping an environment past its configured horizon, or a bad reset.
class EnvError : public Error {
public:
    explicit EnvError(const std::string& message) : Error("env", message) {}
};

/// Q-table file version/dimension problems, encoding mismatches.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace dairyq

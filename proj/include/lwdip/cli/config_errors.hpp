#pragma once

#include "lwdip/core/errors.hpp"

#include <string>

namespace lwdip::cli {

/// Base of every configuration problem; the CLI maps all of them to exit code 2.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class MissingFileError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ConfigSyntaxError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnitError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ConfigInvariantError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

} // namespace lwdip::cli

#pragma once

#include <stdexcept>
#include <string>

namespace docseg {

/// File could not be opened, read or written.
class IOError : public std::runtime_error {
public:
    explicit IOError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File content is not a supported image format / bit depth.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration value (zero block size, corpus smaller than k, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched grid / image / tile geometry.
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace docseg

#pragma once

#include <stdexcept>
#include <string>

namespace sysfi {

// Bad user-supplied data: shapes, faults, specs, configs. The CLI maps this
// to its "validation failure" exit code, everything else to "runtime failure".
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed files (tensors, manifests, fault lists).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sysfi

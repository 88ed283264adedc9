// errors.hpp — error taxonomy shared by the library and the CLI.
#pragma once

#include <stdexcept>
#include <string>

namespace snn {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad user-supplied parameter (rate out of range, invalid cut point, ...).
// CLI maps this to exit code 2.
class ParamError : public Error {
public:
    explicit ParamError(const std::string &msg) : Error(msg) {}
};

// Corrupt or inconsistent data (malformed files, mask/value mismatch, ...).
// CLI maps this to exit code 3.
class DataError : public Error {
public:
    explicit DataError(const std::string &msg) : Error(msg) {}
};

// Violated internal invariant (e.g. executed cycles disagreeing with the
// analytical schedule). CLI maps this to exit code 4.
class InternalError : public Error {
public:
    explicit InternalError(const std::string &msg) : Error(msg) {}
};

} // namespace snn

#pragma once

#include <stdexcept>
#include <string>

namespace survkit {

/// Base class for all survkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: malformed files, bad configuration, out-of-range arguments.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

/// A computation failed: singular matrices, undefined metrics, degenerate data.
class ComputeError : public Error {
public:
    explicit ComputeError(const std::string& what) : Error(what) {}
};

} // namespace survkit

#pragma once

#include <stdexcept>
#include <string>

namespace cubicgen {

// Bad user input: mismatched dimensions, out-of-range occupations, invalid
// configuration values.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite values, failed numerical checks, truncation too coarse in strict
// mode.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// The heralding projection has (numerically) zero probability.
class DegenerateProjection : public NumericError {
public:
    explicit DegenerateProjection(const std::string& what) : NumericError(what) {}
};

}  // namespace cubicgen

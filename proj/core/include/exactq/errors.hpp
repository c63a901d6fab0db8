#pragma once

#include <stdexcept>
#include <string>

namespace exactq {

// Invalid model or run configuration (bad parameters, instability, atoms
// where forbidden). CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Two events landed on the same floating-point instant. The input laws are
// required to be continuous, so this is a numerical accident; the replication
// is aborted rather than tie-broken silently.
class TieError : public std::runtime_error {
public:
    explicit TieError(const std::string& what) : std::runtime_error(what) {}
};

// A run exceeded its configured resource cap (horizon doublings). CLI maps
// this to exit code 3.
class ResourceCapError : public std::runtime_error {
public:
    explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exactq

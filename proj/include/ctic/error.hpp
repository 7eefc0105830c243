#pragma once

#include <stdexcept>
#include <string>

namespace ctic {

/// Malformed input data (bad line in an edge list, cascade CSV, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Violated value constraint (range checks, missing preconditions).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad run configuration (unknown keys, missing files, unknown preset).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// No node satisfies the seed-selection constraint. Carries the best
/// susceptibility present so the caller may decide to relax the rule.
class SeedSelectionError : public ValidationError {
public:
    SeedSelectionError(const std::string& what, double max_susceptibility)
        : ValidationError(what), max_susceptibility_(max_susceptibility) {}

    double max_susceptibility() const { return max_susceptibility_; }

private:
    double max_susceptibility_;
};

} // namespace ctic

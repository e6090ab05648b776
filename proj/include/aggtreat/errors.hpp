#pragma once

#include <stdexcept>
#include <string>

namespace aggtreat {

/// Bad inputs: schema problems, malformed values, contract violations. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// The inputs were well-formed but the computation cannot proceed
/// (degenerate variance, enumeration budget exceeded). CLI exit code 2.
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aggtreat

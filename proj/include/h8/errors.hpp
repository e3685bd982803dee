#pragma once

#include <stdexcept>
#include <string>

namespace h8 {

// Bad input: non-fundamental discriminant, shape mismatch, unknown case name.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A request that exceeds a configured search or memory budget.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

}  // namespace h8

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qhlab {

// Precondition or parameter-range violation.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Any failure of a numerical procedure; maps to exit code 2 in the CLI.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureError : public NumericError {
public:
    QuadratureError(const std::string& what, double estimate, double error_bound);
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

class NotPsdError : public NumericError {
public:
    NotPsdError(std::size_t pivot, double pivot_value);
    std::size_t pivot() const noexcept { return pivot_; }
    double pivot_value() const noexcept { return pivot_value_; }

private:
    std::size_t pivot_;
    double pivot_value_;
};

// Negative incremental variance beyond tolerance.
class ModelInconsistencyError : public NumericError {
public:
    explicit ModelInconsistencyError(const std::string& what) : NumericError(what) {}
};

}  // namespace qhlab

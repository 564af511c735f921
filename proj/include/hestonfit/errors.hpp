#pragma once

#include <stdexcept>
#include <string>

namespace hestonfit {

/// Invalid argument values (parameter constraints, domain violations).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed or inconsistent input data (price files, degenerate samples).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: quadrature non-convergence, branch-cut discontinuity.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Not enough data to run a procedure (e.g. fewer than 4 chi-square bins).
class InsufficientData : public std::runtime_error {
public:
    explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hestonfit

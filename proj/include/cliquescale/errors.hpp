#pragma once

#include <stdexcept>
#include <string>

namespace cliquescale {

/// Argument outside the mathematical domain of an operation (h < 1, x < 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Model parameter rejected at construction (alpha <= 2, bad l parameters, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An improper integral that does not converge (b = inf with beta >= alpha - 1).
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inverse-CDF sampling requested from a tail that is not a valid distribution.
class UnsupportedSampling : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Instance too large for the memory / enumeration budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or config document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cliquescale

#pragma once

#include <stdexcept>
#include <string>

namespace lppl {

/// Raised when a formula is evaluated outside its domain (t >= t_c, r <= g, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for invalid or insufficient input data (bad CSV, short windows, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lppl

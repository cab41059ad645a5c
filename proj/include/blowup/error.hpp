#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or inadmissible problem configuration (violated hypothesis,
/// unknown key, declared/measured index mismatch).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite evaluation or failed extrapolation.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Nonlinear solver failure (Newton divergence, exhausted cap ladder).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output file or directory cannot be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace blowup

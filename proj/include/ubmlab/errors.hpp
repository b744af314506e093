#pragma once

#include <stdexcept>
#include <string>

namespace ubmlab {

/// Tensor dimension N^n exceeds the configured memory cap.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the validity range of a formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A requested time is not a node of the simulation grid.
class OffGridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerically singular update in a projected integrator step.
class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A check was invoked on a fixture that violates its precondition.
class MisuseError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed input file; the message carries file and line.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ubmlab

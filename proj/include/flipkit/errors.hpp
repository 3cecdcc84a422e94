#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flipkit {

// Input that violates a documented precondition or invariant. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Aggregated configuration problems, one path-qualified message per entry.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Numerical failure (no convergence, failed extraction, ...). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, long iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double residual_;
    long iterations_;
};

class ExtractionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CutoffError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace flipkit

#pragma once

#include <stdexcept>
#include <string>

namespace ddl {

// Precondition or argument violation. The CLI maps it to exit code 2.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside a sampled or admissible range.
class RangeError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class InsufficientDataError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class NotApplicableError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Requested radius is below what the frequency cutoff can resolve.
class ResolutionError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// The stationary fit cannot terminate because the integral of m(1/xi) converges at 0.
class FitImpossibleError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Numerical non-convergence; carries whatever partial value was reached.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial)
        : std::runtime_error(what), partial_value(partial) {}
    double partial_value;
};

}  // namespace ddl

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlb {

/// Invalid model data or a value outside an operation's domain.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An MDP or policy that fails structural checks while being loaded.
class ValidationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Hdtd target evaluated at (or numerically next to) its pole 1 + k*v = 0.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Base for iterative solvers that stop without reaching a fixed point.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

class NonConvergenceError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

class DivergenceError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// File system failures; the message always names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed command line or configuration.
class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlb

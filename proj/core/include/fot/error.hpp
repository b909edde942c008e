#pragma once

#include <stdexcept>
#include <string>

namespace fot {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions are incompatible.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input lies outside the operation's domain (asymmetric, non-finite, out of range).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative method ran out of sweeps before meeting its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// An iteration produced NaN/Inf.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}

    [[nodiscard]] int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// A covariance or operand expected to be PSD has a significantly negative eigenvalue.
class NotPsdError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A linear system or Sylvester operator is (numerically) singular.
class SingularError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (network topology, training config, CLI options).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fot

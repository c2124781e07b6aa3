#pragma once

#include <stdexcept>
#include <string>

namespace sers {

// Base of every error thrown by the library. The C API maps each subclass to
// a distinct status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SpaceMismatchError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Factorization failed or the Liouvillian kernel is not one-dimensional.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double second_eigenvalue = -1.0)
        : Error(what), second_eigenvalue_(second_eigenvalue) {}

    // |lambda_2| estimate on the trace-zero subspace, negative if unknown.
    double second_eigenvalue() const noexcept { return second_eigenvalue_; }

private:
    double second_eigenvalue_;
};

// Shifted resolvent singular at a given frequency.
class SingularShiftError : public SolverError {
public:
    SingularShiftError(const std::string& what, double omega) : SolverError(what), omega_(omega) {}
    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

class IntegratorError : public Error {
public:
    using Error::Error;
};

class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sers

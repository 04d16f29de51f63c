#pragma once

#include <stdexcept>
#include <string>

namespace diamondrec {

/// Operand dimensions do not fit the operation.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A caller-side precondition was violated (non-extremal input, odd
/// dimension where an even one is required, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by sqrt_psd when the input has an eigenvalue below -tol.
class NotPsdError : public std::domain_error {
public:
    NotPsdError(const std::string& what, double eigenvalue)
        : std::domain_error(what), eigenvalue_(eigenvalue) {}

    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Iterative kernel failed to converge or produced non-finite values.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, long iterations = -1)
        : std::runtime_error(what), iterations_(iterations) {}

    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

/// File could not be read or written, or its contents could not be parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace diamondrec

#pragma once

#include <stdexcept>
#include <string>

namespace degen {

enum class ErrorKind {
    domain,           // argument outside the coefficient's domain
    quadrature,       // integral did not converge
    indeterminate,    // exponent or mass extrapolation inconclusive
    derivative_jump,  // one-sided derivatives differ at a joint
    assembly,         // matrix construction failed
    resolvent_pole,   // shifted operator is not positive definite
    hypothesis,       // precondition of a structural statement fails
    eigensolver,
    config,           // malformed scenario or parameters
    unsupported,      // request outside what the library realizes
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown by eval_derivative at a non-smooth joint.
class DerivativeJump : public Error {
public:
    DerivativeJump(double x, double left, double right);

    double x;
    double left;
    double right;
};

}  // namespace degen

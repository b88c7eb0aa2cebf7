#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hedgesym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (negative base, x <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent parameters.
class ParamError : public Error {
public:
    using Error::Error;
};

/// A group parameter choice that leads to trivial invariants (sin or cos of phi vanishing).
class TrivialCaseError : public ParamError {
public:
    using ParamError::ParamError;
};

/// Reaction-function parameters violate the utility constraints.
class AdmissibilityError : public ParamError {
public:
    AdmissibilityError(const std::string& what, std::vector<std::string> violations)
        : ParamError(what), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Negative discriminant of the power-option exponent quadratic.
class ComplexRootsError : public ParamError {
public:
    ComplexRootsError(const std::string& what, double discriminant)
        : ParamError(what), discriminant_(discriminant) {}

    double discriminant() const noexcept { return discriminant_; }

private:
    double discriminant_;
};

/// Malformed grid (too few points, non-increasing axes, S <= 0, ragged CSV).
class GridError : public Error {
public:
    using Error::Error;
};

/// Denominator guard violated.
class GuardError : public Error {
public:
    GuardError(const std::string& what, std::size_t violations = 0, std::size_t n_interior = 0)
        : Error(what), violations_(violations), n_interior_(n_interior) {}

    std::size_t violations() const noexcept { return violations_; }
    std::size_t n_interior() const noexcept { return n_interior_; }

private:
    std::size_t violations_;
    std::size_t n_interior_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class StepUnderflowError : public Error {
public:
    StepUnderflowError(const std::string& what, double z) : Error(what), z_(z) {}
    double z() const noexcept { return z_; }

private:
    double z_;
};

/// No real slope solves the implicit ODE at the query point.
class NoRealBranchError : public Error {
public:
    NoRealBranchError(const std::string& what, double z) : Error(what), z_(z) {}
    double z() const noexcept { return z_; }

private:
    double z_;
};

class BasisError : public Error {
public:
    using Error::Error;
};

/// Vector field outside the class with closed-form flows.
class UnsupportedFieldError : public Error {
public:
    using Error::Error;
};

}  // namespace hedgesym

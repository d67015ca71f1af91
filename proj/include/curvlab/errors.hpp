#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvlab {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (index ranges,
// warp intervals, log of a non-positive quantity).
class DomainError : public Error {
public:
    using Error::Error;
};

// A documented precondition of a lemma check does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Curvature vector is outside the Garding cone a check requires.
class NotInConeError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// A bound supplied by the caller is violated by the data (e.g. sigma_k above psi_sup).
class BoundViolationError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DegenerateDenominatorError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class SamplerStarvationError : public Error {
public:
    SamplerStarvationError(const std::string& what, std::size_t attempts, std::size_t accepted)
        : Error(what), attempts_(attempts), accepted_(accepted) {}

    std::size_t attempts() const noexcept { return attempts_; }
    std::size_t accepted() const noexcept { return accepted_; }

private:
    std::size_t attempts_;
    std::size_t accepted_;
};

// Numerical discretization broke down at a node (non-SPD metric, failed eigen-solve).
class DiscretizationError : public Error {
public:
    DiscretizationError(const std::string& what, std::size_t node) : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

// Graph is not k-admissible at some node.
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& what, std::size_t node) : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class StallError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Malformed configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace curvlab

#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation (r <= 0, t <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter combination (n = 0, unsorted profile, unequal spacing, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The model does not support the requested operation.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// The grid cannot resolve the singular part of the jump kernel.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A sub-domain is not aligned with the cell boundaries of the grid.
class GridError : public Error {
public:
    using Error::Error;
};

/// Iteration failure or loss of accuracy in a numerical kernel.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration or hypothesis validation failure.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace levylab

#pragma once

#include <stdexcept>

namespace mmot {

/// Base class for all recoverable toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A logarithm (or a gradient that needs one) was requested at or beyond the
/// cut locus of the base point, where the minimizing geodesic is not unique.
class CutLocusError : public Error {
 public:
  using Error::Error;
};

/// No descent start reached the gradient tolerance within the iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires a unique minimizer was given a tied one.
class NonUniqueError : public Error {
 public:
  using Error::Error;
};

/// A tensor or LP instance exceeds the configured size cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Unexpected numerical breakdown (ill-conditioned basis, infeasible system).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative scheme hit its iteration limit before reaching tolerance.
class IterationLimitError : public Error {
 public:
  using Error::Error;
};

/// An enumeration oracle would exceed its tuple cap.
class CapError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration file or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmot

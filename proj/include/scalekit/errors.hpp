#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation at a pole of the claim-size transform.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A root finder or series failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Two roots of the killed exponent are closer than the distinctness tolerance.
class RepeatedRootError : public Error {
 public:
  using Error::Error;
};

/// The killed exponent has complex conjugate roots; the closed-form
/// exponential-sum machinery refuses, the offending roots are reported.
class ComplexRootError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

class DerivativeUnavailable : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a law (x not in [0,b], negative level, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a specific killing rate (usually delta = 0 or delta > 0).
class DeltaError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a specific sign of the profit rate kappa'(0+).
class DriftSignError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ScanError : public Error {
 public:
  using Error::Error;
};

class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IncompatibleDynamics : public Error {
 public:
  using Error::Error;
};

}  // namespace scalekit

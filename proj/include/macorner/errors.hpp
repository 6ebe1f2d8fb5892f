#pragma once

#include <stdexcept>
#include <string>

namespace macorner {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation (c <= 0, t out of range, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Requested evaluation points fall outside the region where a field is defined.
class ExtentError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

/// Two fields or results that must share a lattice do not.
class GridError : public Error {
public:
  using Error::Error;
};

class BracketError : public Error {
public:
  using Error::Error;
};

/// Numerical evidence contradicts a structural property that must hold.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

class ConvexityError : public Error {
public:
  using Error::Error;
};

class ConstructionError : public Error {
public:
  using Error::Error;
};

class StencilSupportError : public Error {
public:
  using Error::Error;
};

/// Malformed files or records.
class InputError : public Error {
public:
  using Error::Error;
};

/// An iterative method failed; carries the last residual it reached.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class SingularityError : public SolverError {
public:
  explicit SingularityError(const std::string& what) : SolverError(what, 0.0) {}
};

}  // namespace macorner

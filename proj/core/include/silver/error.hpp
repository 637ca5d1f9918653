#pragma once

#include <stdexcept>
#include <string>

namespace silver {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative kernel did not converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be SPD has an eigenvalue at or below the floor.
class DegenerateMatrix : public Error {
 public:
  DegenerateMatrix(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// A Bures-Wasserstein exp step collapsed the covariance. Carries the
/// smallest eigenvalue (or singular value, for non-symmetric factors) of S + I.
class DegenerateCovariance : public Error {
 public:
  DegenerateCovariance(const std::string& what, double factor_min_eigenvalue)
      : Error(what), factor_min_eigenvalue_(factor_min_eigenvalue) {}
  double factor_min_eigenvalue() const noexcept { return factor_min_eigenvalue_; }

 private:
  double factor_min_eigenvalue_;
};

/// Caller broke a precondition (shape mismatch, wrong base point, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// log / transport requested outside the injectivity domain.
class UndefinedLog : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain (k out of range, kappa <= 1, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace silver

#pragma once

#include <stdexcept>
#include <string>

namespace cvsteady {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical parameters or a malformed configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The drift matrix is not Hurwitz, so no steady state exists.
class NotStable : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Bath correlations violate |M|^2 <= N(N+1), or the noise covariance is not
/// positive semidefinite.
class UnphysicalBath : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// The stroboscopic map did not contract below tolerance in the allotted
/// number of periods.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Configuration file or command-line error, carrying the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cvsteady

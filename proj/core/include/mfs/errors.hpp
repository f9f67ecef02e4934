#pragma once

#include <stdexcept>
#include <string>

namespace mfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input point outside the benchmark box.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dimension or row-count mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Fidelity level not defined for the requested benchmark.
class LevelError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Covariance matrix could not be factorized even after jitter escalation.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// CSV header or cell did not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent method / pairing / stage combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A budget asks for more rows than a training pool holds.
class AllocationError : public Error {
 public:
  using Error::Error;
};

/// Metric is undefined for the given inputs (e.g. R^2 with constant truth).
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfs

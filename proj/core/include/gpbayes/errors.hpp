#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpbayes {

/// Precondition violations: bad dimensions, non-positive parameters, length mismatches.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for numerical failures detected at run time.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel (or covariance) matrix could not be factorized even with the largest jitter.
class IllConditionedKernel : public NumericalError {
 public:
  IllConditionedKernel(const std::string& what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
  [[nodiscard]] double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Evidence or normalizing constant below the representable range.
class UnderflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A frozen sample path was queried outside the grid it was realized on.
class ExtrapolationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Rejection sampling gave up before collecting the requested number of points.
class RejectionCapExceeded : public NumericalError {
 public:
  RejectionCapExceeded(const std::string& what, double acceptance_rate)
      : NumericalError(what), acceptance_rate_(acceptance_rate) {}
  [[nodiscard]] double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

/// A superlevel set turned out to be empty on the scan grid.
class EmptyRegion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gpbayes

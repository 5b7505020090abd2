#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpinterp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefiniteError : public Error {
 public:
  NotPositiveSemidefiniteError(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double off_diagonal)
      : Error(what), off_diagonal_(off_diagonal) {}
  /// Off-diagonal Hilbert-Schmidt norm left when the sweep cap was hit.
  double off_diagonal() const noexcept { return off_diagonal_; }

 private:
  double off_diagonal_;
};

/// A linear relation among the inputs that the outputs do not satisfy; no
/// linear map (CP or otherwise) can interpolate the data.
class InconsistentDependenceError : public Error {
 public:
  InconsistentDependenceError(const std::string& what, std::size_t index, double mismatch)
      : Error(what), index_(index), mismatch_(mismatch) {}
  std::size_t index() const noexcept { return index_; }
  double mismatch() const noexcept { return mismatch_; }

 private:
  std::size_t index_;
  double mismatch_;
};

class InertiaConditionError : public Error {
 public:
  using Error::Error;
};

class RelationError : public Error {
 public:
  using Error::Error;
};

class ResidualError : public Error {
 public:
  ResidualError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace cpinterp

#pragma once

#include <stdexcept>
#include <string>

namespace qrem {

/// Base class for all errors thrown by this library.
///
/// The taxonomy below maps onto the CLI exit codes: configuration and
/// argument misuse exit with 2, capacity overruns with 3, I/O failures
/// with 4.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (empty grids, bad probe counts, ...).
class config_error : public error {
 public:
  using error::error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  using error::error;
};

/// Mismatched spin counts or vector lengths.
class dimension_error : public error {
 public:
  using error::error;
};

/// Problem size beyond the supported range (memory or enumeration limits).
class capacity_error : public error {
 public:
  using error::error;
};

/// File read/write failure.
class io_error : public error {
 public:
  using error::error;
};

/// Iterative solver failed to reach the requested tolerance.
/// Carries the best estimate found so the caller can still inspect it.
class convergence_error : public error {
 public:
  convergence_error(const std::string& what, double best_estimate)
      : error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace qrem

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pleg {

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

/// Base of every numerical failure raised by the library.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "NumericalError"; }
};

/// An iterative solve did not reach its residual tolerance.
class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "ConvergenceFailure"; }
};

/// A Newton iterate left the admissible cone 1 + u_xx > 0.
class ConvexityLost : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "ConvexityLost"; }
};

/// A slice of a strip field has non-positive Hessian margin.
class SliceNotConvex : public NumericalError {
 public:
  SliceNotConvex(int slice, double margin)
      : NumericalError("slice " + std::to_string(slice) +
                       " not convex (margin " + detail::sci(margin) + ")"),
        slice_(slice),
        margin_(margin) {}
  const char* kind() const noexcept override { return "SliceNotConvex"; }
  int slice() const noexcept { return slice_; }
  double margin() const noexcept { return margin_; }

 private:
  int slice_;
  double margin_;
};

/// A post-condition of a solve (boundary fidelity, convexity margin) failed.
class InvariantViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "InvariantViolation"; }
};

class ResidualTooLarge : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
  const char* kind() const noexcept override { return "ResidualTooLarge"; }
};

}  // namespace pleg

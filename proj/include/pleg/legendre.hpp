#pragma once

// Partial Legendre transform of periodic potentials:
//   y = grad u(x) + x,   f(y) = -|x - y|^2 / 2 - u(x).

#include "pleg/strip_field.hpp"
#include "pleg/torus_field.hpp"

#include <vector>

namespace pleg {

inline constexpr double kInversionTolerance = 1e-12;
inline constexpr int kInversionMaxIterations = 100;

struct InversionResult {
  Point x;
  double residual = 0;  // |grad u(x) + x - y| before branch reduction
  int iterations = 0;
};

/// The gradient map x -> grad u(x) + x of a convex potential and its
/// inverse. The inverse branch is the one with x - y in [-1/2, 1/2)^n.
class LegendreMap {
 public:
  explicit LegendreMap(const PeriodicPotential& u);

  const PeriodicPotential& potential() const { return u_; }
  const TrigInterpolant<double>& interpolant() const { return interp_; }

  Point forward(const Point& x) const;
  /// Throws ConvergenceFailure when the residual stays above
  /// kInversionTolerance after kInversionMaxIterations steps.
  InversionResult invert(const Point& y) const;

 private:
  // n = 1: bracketing bisection on the increasing scalar map, Newton polish
  InversionResult invert_monotone(const Point& y) const;
  // n >= 2: damped Newton seeded at x = y
  InversionResult invert_newton(const Point& y) const;

  PeriodicPotential u_;
  TrigInterpolant<double> interp_;
};

/// y(x) at every node, one column per direction.
Eigen::MatrixXd forward_map(const PeriodicPotential& u);

Point invert_map(const PeriodicPotential& u, const Point& y);

struct TransformPair {
  PeriodicPotential u;
  PeriodicPotential f;       // on a y-grid of the same sizes
  Eigen::MatrixXd x_of_y;    // preimage of each y-node, one column per direction
  Eigen::VectorXd det_g;     // det(D^2 u + I) at the x-nodes
  Eigen::VectorXd det_h;     // det(D^2 f + I) at the y-nodes
};

TransformPair partial_transform(const PeriodicPotential& u);

/// Transform of the conjugate; recovers u.
PeriodicPotential inverse_transform(const TransformPair& pair);

/// max over y-nodes of |det_g(x(y)) det_h(y) - 1|.
double reciprocity_error(const TransformPair& pair);

/// max over y-nodes and entries of |d x / d y - (D^2 u + I)^{-1}(x(y))|, with
/// d x / d y from spectral derivatives of the tabulated map.
double jacobian_consistency_error(const TransformPair& pair);

/// Slice-wise transform of u(x, t) to f(y, s), s = t.
struct StripPair {
  StripField u;
  StripField f;
  std::vector<StripField> x_of_ys;  // one per direction
  std::vector<double> margins_u;
  std::vector<double> margins_f;
};

/// Throws SliceNotConvex for the first slice with margin <= 0.
StripPair partial_transform_strip(const StripField& u);

}  // namespace pleg

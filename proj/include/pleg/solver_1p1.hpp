#pragma once

// The degenerate 1+1 Monge-Ampere equation
//   u_tt (1 + u_xx) - u_xt^2 = eps   on circle x [0, 1],
// with Dirichlet slices u(., 0) = u0, u(., 1) = u1, solved through the
// partial Legendre transform, where it becomes f_ss + eps (1 + f_yy) = 0.

#include "pleg/legendre.hpp"
#include "pleg/strip_field.hpp"

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace pleg {

struct BoundaryData {
  PeriodicPotential u0;
  PeriodicPotential u1;
  double lambda = 0;  // min of the two convexity margins

  /// Throws std::invalid_argument unless both potentials are one-dimensional,
  /// share a grid and have positive margin.
  static BoundaryData make(PeriodicPotential u0, PeriodicPotential u1);
};

/// Conjugates f0, f1 of the boundary potentials.
std::pair<PeriodicPotential, PeriodicPotential> transform_boundary(
    const BoundaryData& b);

/// Exact per-mode solution of f_ss + eps (1 + f_yy) = 0 with Dirichlet data.
/// Internally solves the homogeneous problem for fc = f + eps s^2 / 2,
///   fc_ss + eps fc_yy = 0,  fc(., 0) = f0,  fc(., 1) = f1 + eps / 2,
/// whose mode k is  a_k S(1 - s) + b_k S(s)  with S(s) = sinh(mu s) / sinh(mu),
/// mu = 2 pi |k| sqrt(eps), evaluated in exponentially scaled form.
class DualLaplaceSolution {
 public:
  DualLaplaceSolution(const PeriodicField<double>& f0,
                      const PeriodicField<double>& f1, double epsilon);

  double epsilon() const { return epsilon_; }
  const TorusGrid& grid() const { return grid_; }

  /// d_y^m d_s^k of the homogeneous part at the grid nodes of level s. Odd
  /// m drop the Nyquist mode, as spectral differentiation does on nodes.
  Eigen::VectorXd homogeneous(double s, int m = 0, int k = 0) const;
  /// The same for f itself.
  Eigen::VectorXd dual(double s, int m = 0, int k = 0) const;
  /// d_y^m d_s^k of the homogeneous part at an arbitrary point, with the
  /// Nyquist mode read as cos(pi N y).
  double homogeneous_at(double y, double s, int m = 0, int k = 0) const;

  StripField sample(int intervals) const;
  StripField sample_homogeneous(int intervals) const;

 private:
  std::vector<std::complex<double>> mode_values(double s, int k) const;

  TorusGrid grid_;
  double epsilon_;
  std::vector<std::complex<double>> a_;  // unnormalized DFT of fc(., 0)
  std::vector<std::complex<double>> b_;  // unnormalized DFT of fc(., 1)
};

/// Throws std::invalid_argument unless 0 < eps <= 1 and the grids match.
DualLaplaceSolution solve_dual_laplace(const PeriodicPotential& f0,
                                       const PeriodicPotential& f1,
                                       double epsilon);

/// Slice-wise inverse transform. Throws SliceNotConvex for the first slice
/// of f with non-positive margin.
StripField recover_u(const StripField& f);

struct SolveOptions {
  int intervals = 0;                 // s-slices; 0 means the x-grid size
  double residual_bound = 1e-1;      // ResidualTooLarge above this
  double boundary_tolerance = 1e-9;
  double margin_tolerance = 1e-6;
};

struct DualSolveResult {
  double epsilon = 0;
  double lambda = 0;
  StripField f;
  StripField u;
  double residual_ma = 0;  // sup |u_tt (1 + u_xx) - u_xt^2 - eps|
  double margin_min = 0;   // min of 1 + u_xx
  std::optional<DualLaplaceSolution> dual;
};

/// u_tt (1 + u_xx) - u_xt^2 - eps node-wise: spectral in x, fourth-order
/// finite differences in t.
StripField residual_ma(const StripField& u, double epsilon);

/// transform_boundary -> solve_dual_laplace -> recover_u, then checks the
/// boundary slices (InvariantViolation), the margin against lambda
/// (InvariantViolation) and the residual (ResidualTooLarge).
DualSolveResult solve_1p1(const BoundaryData& b, double epsilon,
                          const SolveOptions& options = {});

struct FdOptions {
  int intervals = 0;  // t-slices; 0 means the x-grid size
  double tolerance = 1e-10;
  int max_steps = 50;
};

/// Damped Newton on the centred finite-difference discretization of the
/// same equation, Dirichlet slices fixed. Trial steps with 1 + D_xx u <= 0
/// somewhere are halved away. Throws ConvexityLost when no convex step (or
/// initial guess) exists and ConvergenceFailure after max_steps or a stall.
StripField fd_reference_solver(const BoundaryData& b, double epsilon,
                               const FdOptions& options = {});

/// Sup-norm of the discrete residual the reference solver drives to zero.
double fd_residual(const StripField& u, double epsilon);

}  // namespace pleg

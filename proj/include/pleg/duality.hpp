#pragma once

// Residual operators for the identities linking a strip potential u(x, t)
// to its partial Legendre transform f(y, s).
//
// Conventions: x/y derivatives are spectral, t/s derivatives are finite
// differences on the slices (second order, one-sided at the ends). Every
// u-side quantity is evaluated at the mapped point x(y, s) by trigonometric
// interpolation of its slice, so identities are compared node-wise on the
// (y, s) grid.

#include "pleg/legendre.hpp"
#include "pleg/strip_field.hpp"

#include <string>
#include <vector>

namespace pleg {

/// A strip potential, its transform and every derived field the identity
/// checks share. Built once by make_strip_transform.
struct StripTransform {
  StripField u;                     // (x, t)
  StripField f;                     // (y, s)
  std::vector<StripField> x_of_ys;  // x_k(y, s)
  StripField K;                     // det(D^2_{x,t} u + I_x) on (x, t)
  StripField K_at_y;                // K transported to (y, s)
  StripField K_tilde;               // det(D^2_{y,s} f + I_y) on (y, s)

  // u-side data at the mapped points
  StripField u_t;
  StripField u_tt;
  std::vector<StripField> u_tx;     // per direction
  std::vector<StripField> metric;   // g = D^2_x u + I, entry (a, b) at a * n + b
  StripField det_g;

  // f-side data on the (y, s) grid
  StripField f_s;
  StripField f_ss;
  std::vector<StripField> f_sy;     // per direction
  std::vector<StripField> dual_metric;  // h = D^2_y f + I, entry (a, b) at a * n + b
  StripField det_h;

  int dims() const { return u.grid().dims(); }
};

/// Transforms u slice-wise and tabulates everything above. Throws
/// SliceNotConvex if a slice has non-positive margin.
StripTransform make_strip_transform(const StripField& u);

/// det of the (n+1) x (n+1) matrix [[u_tt, u_tx^T], [u_tx, D^2_x u + I]].
StripField ma_operator(const StripField& u);

/// f_ss + K det(D^2_y f + I), with K given on the (y, s) grid.
StripField dual_ma_operator(const StripField& f, const StripField& K_at_y);

/// Values of a field on (x, t) at the mapped points x(y, s).
StripField transport_to_dual(const StripField& field,
                             const std::vector<StripField>& x_of_ys);

/// Sup-norms of  d_y u_t + d_s x,  d_s u_t - K / det g,  f_s + u_t.
struct FirstOrderResiduals {
  double dy_ut = 0;
  double ds_ut = 0;
  double fs = 0;
};
FirstOrderResiduals check_first_order_identities(const StripTransform& st);

/// Sup-norms of  u_tx + h^{-1} f_sy  and  u_tt + f_ss - f_sy . h^{-1} f_sy.
struct SecondOrderResiduals {
  double u_tx = 0;
  double u_tt = 0;
};
SecondOrderResiduals check_second_order_identities(const StripTransform& st);

/// Derivatives of F(D^2 u) at a point and the matched dual data.
struct SymbolInputs {
  double F_tt = 1;  // dF / du_tt
  Point F_tx;       // dF / du_{t x_j}
  Matrix F_xx;      // dF / du_{x_j x_k}, symmetric
  Point f_sy;       // f_{s y_j}
  Matrix h_inv;     // h^{jk}
};

struct SymbolValue {
  double value = 0;             // expanded form
  double completed_square = 0;  // square completed in tau
  bool forms_agree = false;     // within 1e-12 relative to max(1, |value|)
};

/// Symbol sigma(tau, xi) of the linearized operator written in the dual
/// unknown f. Uses eta = h^{-1} xi in the quadratic part, since the
/// second-order f-variations enter with raised indices. Throws
/// std::invalid_argument unless F_tt > 0.
SymbolValue linearized_symbol(const SymbolInputs& in, double tau,
                              const Point& xi);

/// F_tt tau^2 + F_tx . xi tau + xi^T F_xx xi: the symbol in the u unknown.
double primal_symbol(const SymbolInputs& in, double tau, const Point& xi);

/// Derivatives of F = det(D^2_{x,t} u + I_x) with respect to u_tt, u_{tx_j}
/// (both symmetric entries) and u_{x_j x_k}.
SymbolInputs monge_ampere_symbol_inputs(const BorderedMatrix<double>& hessian);

/// D^2_{x,t} u + I_x written entirely with dual data in the eigenbasis of
/// h = D^2_y f + I, next to the directly computed matrix conjugated into the
/// same basis.
struct BorderedHessian {
  BorderedMatrix<double> assembled;
  BorderedMatrix<double> direct;
  Point eigenvalues;  // of h, ascending
  Matrix basis;       // eigenvectors of h, columns
  double det_assembled = 0;
  double K = 0;       // transported u-side determinant
  double mismatch() const { return (assembled - direct).cwiseAbs().maxCoeff(); }
};
BorderedHessian assemble_dual_hessian(const StripTransform& st, int slice,
                                      Eigen::Index node);

/// Sup over all nodes of the matrix mismatch and of |det(assembled) - K|.
struct BorderedHessianErrors {
  double matrix = 0;
  double determinant = 0;
};
BorderedHessianErrors dual_hessian_errors(const StripTransform& st);

/// u_tt + Laplacian u on (x, t), the Laplace-case source K1.
StripField laplace_source(const StripField& u);

/// Residual of  K~ + K1 det h - sigma_{n-1}(h).  With K1 = u_tt + Laplacian u
/// it carries an offset of -n det(h), since the trace of D^2 u + I_x is
/// K1 + n; `shifted` uses K1 + n and vanishes to discretization error.
struct LaplaceResidual {
  double sup_norm = 0;     // with K1 unshifted
  double mean_offset = 0;  // mean of the unshifted residual
  double oscillation = 0;  // sup |residual - mean|
  double shifted = 0;      // sup-norm with K1 replaced by K1 + n
};
LaplaceResidual hessian_laplace_residual(const StripTransform& st,
                                         const StripField& K1);

/// Sup-norms, per direction j, of  d_s^2 x_j + d_{y_j}(K det(dx/dy)).
std::vector<double> rsw_residual(const StripTransform& st);

/// Every identity residual of a strip transform, keyed by name.
struct IdentityResidual {
  std::string name;
  double sup_norm = 0;
};
std::vector<IdentityResidual> identity_residuals(const StripTransform& st);

}  // namespace pleg

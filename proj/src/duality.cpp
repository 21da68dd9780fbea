#include "pleg/duality.hpp"

#include "pleg/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace pleg {

namespace {

MultiIndex unit(int k, int order = 1) {
  MultiIndex alpha{0, 0, 0};
  alpha[k] = order;
  return alpha;
}

BorderedMatrix<double> bordered(double corner, const Point& border,
                                const Matrix& block) {
  const Eigen::Index n = block.rows();
  BorderedMatrix<double> m(n + 1, n + 1);
  m(0, 0) = corner;
  m.block(0, 1, 1, n) = border.transpose();
  m.block(1, 0, n, 1) = border;
  m.block(1, 1, n, n) = block;
  return m;
}

Point point_at(const std::vector<StripField>& fields, Eigen::Index i, int j) {
  Point p(static_cast<Eigen::Index>(fields.size()));
  for (size_t k = 0; k < fields.size(); ++k) p(k) = fields[k].samples()(i, j);
  return p;
}

Matrix matrix_at(const std::vector<StripField>& fields, int n, Eigen::Index i,
                 int j) {
  Matrix m(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) m(a, b) = fields[a * n + b].samples()(i, j);
  }
  return m;
}

std::vector<StripField> zero_fields(const StripField& like, size_t count) {
  return std::vector<StripField>(count, StripField(like.grid(), like.intervals()));
}

// Slice-wise D^2 + I, stored entry-wise, and its determinant.
void tabulate_metric(const StripField& field, std::vector<StripField>& metric,
                     StripField& det) {
  const int n = field.grid().dims();
  metric = zero_fields(field, static_cast<size_t>(n * n));
  det = StripField(field.grid(), field.intervals());
  parallel_for(field.num_slices(), [&](long jl) {
    const int j = static_cast<int>(jl);
    const HessianField<double> hess(field.slice(j));
    for (Eigen::Index i = 0; i < field.grid().num_nodes(); ++i) {
      const Matrix g = hess.metric(i);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) metric[a * n + b].samples()(i, j) = g(a, b);
      }
      det.samples()(i, j) = g.determinant();
    }
  });
}

}  // namespace

StripField ma_operator(const StripField& u) {
  const int n = u.grid().dims();
  const StripField ut = t_derivative(u, 1);
  const StripField utt = t_derivative(u, 2);
  StripField K(u.grid(), u.intervals());
  parallel_for(u.num_slices(), [&](long jl) {
    const int j = static_cast<int>(jl);
    const HessianField<double> hess(u.slice(j));
    const Spectrum<double> ut_spec(ut.slice(j));
    std::vector<PeriodicField<double>> utx;
    for (int k = 0; k < n; ++k) utx.push_back(ut_spec.derivative(unit(k)));
    for (Eigen::Index i = 0; i < u.grid().num_nodes(); ++i) {
      Point border(n);
      for (int k = 0; k < n; ++k) border(k) = utx[k][i];
      K.samples()(i, j) =
          bordered(utt.samples()(i, j), border, hess.metric(i)).determinant();
    }
  });
  return K;
}

StripField dual_ma_operator(const StripField& f, const StripField& K_at_y) {
  std::vector<StripField> metric;
  StripField det_h;
  tabulate_metric(f, metric, det_h);
  StripField out = t_derivative(f, 2);
  out.samples() += K_at_y.samples().cwiseProduct(det_h.samples());
  return out;
}

StripField transport_to_dual(const StripField& field,
                             const std::vector<StripField>& x_of_ys) {
  StripField out(field.grid(), field.intervals());
  parallel_for(field.num_slices(), [&](long jl) {
    const int j = static_cast<int>(jl);
    const TrigInterpolant<double> interp(field.slice(j));
    for (Eigen::Index i = 0; i < field.grid().num_nodes(); ++i) {
      out.samples()(i, j) = interp(point_at(x_of_ys, i, j));
    }
  });
  return out;
}

StripTransform make_strip_transform(const StripField& u) {
  StripPair pair = partial_transform_strip(u);
  const TorusGrid& grid = u.grid();
  const int n = grid.dims();
  const int M = u.intervals();

  StripTransform st;
  st.u = u;
  st.f = std::move(pair.f);
  st.x_of_ys = std::move(pair.x_of_ys);
  st.K = ma_operator(u);

  const StripField ut = t_derivative(u, 1);
  const StripField utt = t_derivative(u, 2);
  st.K_at_y = StripField(grid, M);
  st.u_t = StripField(grid, M);
  st.u_tt = StripField(grid, M);
  st.det_g = StripField(grid, M);
  st.u_tx = zero_fields(u, static_cast<size_t>(n));
  st.metric = zero_fields(u, static_cast<size_t>(n * n));

  parallel_for(u.num_slices(), [&](long jl) {
    const int j = static_cast<int>(jl);
    const TrigInterpolant<double> ut_i(ut.slice(j));
    const TrigInterpolant<double> utt_i(utt.slice(j));
    const TrigInterpolant<double> u_i(u.slice(j));
    const TrigInterpolant<double> K_i(st.K.slice(j));
    for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
      const Point x = point_at(st.x_of_ys, i, j);
      const Jet<double> ut_jet = ut_i.jet(x);
      Matrix g = u_i.jet(x).hessian;
      g += Matrix::Identity(n, n);
      st.u_t.samples()(i, j) = ut_jet.value;
      st.u_tt.samples()(i, j) = utt_i(x);
      st.K_at_y.samples()(i, j) = K_i(x);
      st.det_g.samples()(i, j) = g.determinant();
      for (int a = 0; a < n; ++a) {
        st.u_tx[a].samples()(i, j) = ut_jet.gradient(a);
        for (int b = 0; b < n; ++b) st.metric[a * n + b].samples()(i, j) = g(a, b);
      }
    }
  });

  st.f_s = t_derivative(st.f, 1);
  st.f_ss = t_derivative(st.f, 2);
  for (int k = 0; k < n; ++k) st.f_sy.push_back(x_derivative(st.f_s, unit(k)));
  tabulate_metric(st.f, st.dual_metric, st.det_h);

  st.K_tilde = StripField(grid, M);
  for (int j = 0; j <= M; ++j) {
    for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
      st.K_tilde.samples()(i, j) =
          bordered(st.f_ss.samples()(i, j), point_at(st.f_sy, i, j),
                   matrix_at(st.dual_metric, n, i, j))
              .determinant();
    }
  }
  return st;
}

FirstOrderResiduals check_first_order_identities(const StripTransform& st) {
  FirstOrderResiduals r;
  for (int k = 0; k < st.dims(); ++k) {
    StripField d = x_derivative(st.u_t, unit(k));
    d.samples() += t_derivative(st.x_of_ys[k], 1).samples();
    r.dy_ut = std::max(r.dy_ut, sup_norm(d));
  }
  StripField ds = t_derivative(st.u_t, 1);
  ds.samples() -= st.K_at_y.samples().cwiseQuotient(st.det_g.samples());
  r.ds_ut = sup_norm(ds);
  r.fs = (st.f_s.samples() + st.u_t.samples()).cwiseAbs().maxCoeff();
  return r;
}

SecondOrderResiduals check_second_order_identities(const StripTransform& st) {
  const int n = st.dims();
  SecondOrderResiduals r;
  for (int j = 0; j < st.f.num_slices(); ++j) {
    for (Eigen::Index i = 0; i < st.f.grid().num_nodes(); ++i) {
      const Matrix h = matrix_at(st.dual_metric, n, i, j);
      const Point fsy = point_at(st.f_sy, i, j);
      const Point hinv_fsy = h.ldlt().solve(fsy);
      r.u_tx = std::max(
          r.u_tx, (point_at(st.u_tx, i, j) + hinv_fsy).cwiseAbs().maxCoeff());
      r.u_tt = std::max(r.u_tt, std::abs(st.u_tt.samples()(i, j) +
                                         st.f_ss.samples()(i, j) -
                                         fsy.dot(hinv_fsy)));
    }
  }
  return r;
}

double primal_symbol(const SymbolInputs& in, double tau, const Point& xi) {
  return in.F_tt * tau * tau + in.F_tx.dot(xi) * tau + xi.dot(in.F_xx * xi);
}

SymbolValue linearized_symbol(const SymbolInputs& in, double tau,
                              const Point& xi) {
  if (!(in.F_tt > 0)) {
    throw std::invalid_argument("linearized_symbol: dF/du_tt must be positive");
  }
  const double a = in.F_tt;
  const Point eta = in.h_inv * xi;
  const double b_eta = in.F_tx.dot(eta);
  const double f_eta = in.f_sy.dot(eta);
  const double c_eta = eta.dot(in.F_xx * eta);

  SymbolValue out;
  out.value = a * tau * tau + (b_eta - 2 * a * f_eta) * tau +
              (a * f_eta * f_eta - b_eta * f_eta + c_eta);
  const double root = std::sqrt(a);
  const double square = tau * root + (0.5 * b_eta - a * f_eta) / root;
  out.completed_square =
      square * square + (4 * a * c_eta - b_eta * b_eta) / (4 * a);
  out.forms_agree = std::abs(out.value - out.completed_square) <=
                    1e-12 * std::max(1.0, std::abs(out.value));
  return out;
}

SymbolInputs monge_ampere_symbol_inputs(const BorderedMatrix<double>& hessian) {
  const Eigen::Index m = hessian.rows();
  const Eigen::Index n = m - 1;
  BorderedMatrix<double> cof(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      if (m == 1) {
        cof(r, c) = 1;
        continue;
      }
      BorderedMatrix<double> minor(m - 1, m - 1);
      for (Eigen::Index i = 0, mi = 0; i < m; ++i) {
        if (i == r) continue;
        for (Eigen::Index k = 0, mk = 0; k < m; ++k) {
          if (k == c) continue;
          minor(mi, mk++) = hessian(i, k);
        }
        ++mi;
      }
      cof(r, c) = ((r + c) % 2 ? -1.0 : 1.0) * minor.determinant();
    }
  }
  SymbolInputs in;
  in.F_tt = cof(0, 0);
  in.F_tx = 2 * cof.block(1, 0, n, 1);
  in.F_xx = cof.block(1, 1, n, n);
  in.f_sy = Point::Zero(n);
  in.h_inv = Matrix::Identity(n, n);
  return in;
}

BorderedHessian assemble_dual_hessian(const StripTransform& st, int slice,
                                      Eigen::Index node) {
  const int n = st.dims();
  const Matrix h = matrix_at(st.dual_metric, n, node, slice);
  const auto eig = sorted_eigen(h);
  const double det_h = eig.values.prod();
  const Point rotated = eig.vectors.transpose() * point_at(st.f_sy, node, slice);

  BorderedHessian out;
  out.eigenvalues = eig.values;
  out.basis = eig.vectors;
  Point border(n);
  Matrix block = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    border(k) = -rotated(k) / eig.values(k);
    block(k, k) = 1 / eig.values(k);
  }
  out.assembled =
      bordered(-st.K_tilde.samples()(node, slice) / det_h, border, block);

  const BorderedMatrix<double> direct =
      bordered(st.u_tt.samples()(node, slice), point_at(st.u_tx, node, slice),
               matrix_at(st.metric, n, node, slice));
  BorderedMatrix<double> P = BorderedMatrix<double>::Zero(n + 1, n + 1);
  P(0, 0) = 1;
  P.block(1, 1, n, n) = eig.vectors;
  out.direct = P.transpose() * direct * P;
  out.det_assembled = out.assembled.determinant();
  out.K = st.K_at_y.samples()(node, slice);
  return out;
}

BorderedHessianErrors dual_hessian_errors(const StripTransform& st) {
  BorderedHessianErrors e;
  for (int j = 0; j < st.f.num_slices(); ++j) {
    for (Eigen::Index i = 0; i < st.f.grid().num_nodes(); ++i) {
      const BorderedHessian bh = assemble_dual_hessian(st, j, i);
      e.matrix = std::max(e.matrix, bh.mismatch());
      e.determinant = std::max(e.determinant, std::abs(bh.det_assembled - bh.K));
    }
  }
  return e;
}

StripField laplace_source(const StripField& u) {
  StripField K1 = t_derivative(u, 2);
  for (int k = 0; k < u.grid().dims(); ++k) {
    K1.samples() += x_derivative(u, unit(k, 2)).samples();
  }
  return K1;
}

LaplaceResidual hessian_laplace_residual(const StripTransform& st,
                                         const StripField& K1) {
  const int n = st.dims();
  const StripField K1_at_y = transport_to_dual(K1, st.x_of_ys);
  Eigen::MatrixXd r(st.f.samples().rows(), st.f.samples().cols());
  for (int j = 0; j < st.f.num_slices(); ++j) {
    for (Eigen::Index i = 0; i < st.f.grid().num_nodes(); ++i) {
      const Matrix h = matrix_at(st.dual_metric, n, i, j);
      r(i, j) = st.K_tilde.samples()(i, j) +
                K1_at_y.samples()(i, j) * st.det_h.samples()(i, j) -
                elementary_symmetric(h, n - 1);
    }
  }
  LaplaceResidual out;
  out.sup_norm = r.cwiseAbs().maxCoeff();
  out.mean_offset = r.mean();
  out.oscillation = (r.array() - out.mean_offset).abs().maxCoeff();
  out.shifted = (r + n * st.det_h.samples()).cwiseAbs().maxCoeff();
  return out;
}

std::vector<double> rsw_residual(const StripTransform& st) {
  const TorusGrid& grid = st.f.grid();
  const int n = grid.dims();
  std::vector<StripField> displacement = st.x_of_ys;
  for (int a = 0; a < n; ++a) {
    for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
      displacement[a].samples().row(i).array() -= grid.node(i)(a);
    }
  }
  std::vector<StripField> jac;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) jac.push_back(x_derivative(displacement[a], unit(b)));
  }
  StripField flux(grid, st.f.intervals());
  for (int j = 0; j < st.f.num_slices(); ++j) {
    for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
      Matrix J = matrix_at(jac, n, i, j);
      J += Matrix::Identity(n, n);
      flux.samples()(i, j) = st.K_at_y.samples()(i, j) * J.determinant();
    }
  }
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    StripField r = t_derivative(st.x_of_ys[k], 2);
    r.samples() += x_derivative(flux, unit(k)).samples();
    out.push_back(sup_norm(r));
  }
  return out;
}

std::vector<IdentityResidual> identity_residuals(const StripTransform& st) {
  const FirstOrderResiduals first = check_first_order_identities(st);
  const SecondOrderResiduals second = check_second_order_identities(st);
  const BorderedHessianErrors bordered_err = dual_hessian_errors(st);
  const LaplaceResidual laplace =
      hessian_laplace_residual(st, laplace_source(st.u));
  std::vector<IdentityResidual> out = {
      {"dual_ma", sup_norm(dual_ma_operator(st.f, st.K_at_y))},
      {"dy_ut_plus_ds_x", first.dy_ut},
      {"ds_ut_minus_K_over_det_g", first.ds_ut},
      {"fs_plus_ut", first.fs},
      {"utx_from_dual", second.u_tx},
      {"utt_from_dual", second.u_tt},
      {"bordered_hessian", bordered_err.matrix},
      {"bordered_hessian_det", bordered_err.determinant},
      {"laplace_shifted", laplace.shifted},
  };
  const std::vector<double> rsw = rsw_residual(st);
  for (size_t k = 0; k < rsw.size(); ++k) {
    out.push_back({"rsw_" + std::to_string(k), rsw[k]});
  }
  return out;
}

}  // namespace pleg

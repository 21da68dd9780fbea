#include "pleg/legendre.hpp"

#include "pleg/errors.hpp"
#include "pleg/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pleg {

namespace {

void require_convex(const PeriodicPotential& u, const char* who) {
  if (!u.is_convex()) {
    throw std::invalid_argument(std::string(who) +
                                ": potential margin must be positive, got " +
                                std::to_string(u.margin()));
  }
}

// nearest periodic image of x relative to y
Point reduce_branch(Point x, const Point& y) {
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    x(d) -= std::floor(x(d) - y(d) + 0.5);
  }
  return x;
}

}  // namespace

LegendreMap::LegendreMap(const PeriodicPotential& u)
    : u_(u), interp_(u.samples()) {
  require_convex(u_, "LegendreMap");
}

Point LegendreMap::forward(const Point& x) const {
  return interp_.jet(x).gradient + x;
}

InversionResult LegendreMap::invert(const Point& y) const {
  InversionResult r =
      u_.grid().dims() == 1 ? invert_monotone(y) : invert_newton(y);
  r.x = reduce_branch(r.x, y);
  return r;
}

InversionResult LegendreMap::invert_monotone(const Point& y) const {
  Point x(1);
  auto residual = [&](double xv) {
    x(0) = xv;
    const auto j = interp_.jet(x);
    return std::pair{xv + j.gradient(0) - y(0), 1.0 + j.hessian(0, 0)};
  };
  // |u_x| < 1 whenever 1 + u_xx > 0 on the circle, so this brackets the root
  double lo = y(0) - 1.0;
  double hi = y(0) + 1.0;
  int iterations = 0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid).first < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  double xv = 0.5 * (lo + hi);
  for (; iterations < kInversionMaxIterations; ++iterations) {
    const auto [r, slope] = residual(xv);
    if (std::abs(r) <= kInversionTolerance) {
      Point out(1);
      out(0) = xv;
      return {out, std::abs(r), iterations};
    }
    if (r < 0) {
      lo = xv;
    } else {
      hi = xv;
    }
    double next = xv - r / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    xv = next;
  }
  throw ConvergenceFailure("invert_map: no convergence for y = " +
                           std::to_string(y(0)));
}

InversionResult LegendreMap::invert_newton(const Point& y) const {
  Point x = y;
  auto jet = interp_.jet(x);
  Point r = jet.gradient + x - y;
  double norm = r.norm();
  for (int it = 0; it < kInversionMaxIterations; ++it) {
    if (norm <= kInversionTolerance) return {x, norm, it};
    Matrix jac = jet.hessian;
    jac.diagonal().array() += 1.0;
    const Point step = jac.ldlt().solve(-r);
    double alpha = 1.0;
    for (int halving = 0; halving < 40; ++halving, alpha *= 0.5) {
      const Point trial = x + alpha * step;
      auto trial_jet = interp_.jet(trial);
      const Point trial_r = trial_jet.gradient + trial - y;
      const double trial_norm = trial_r.norm();
      if (trial_norm < norm || halving == 39) {
        x = trial;
        jet = std::move(trial_jet);
        r = trial_r;
        norm = trial_norm;
        break;
      }
    }
  }
  if (norm <= kInversionTolerance) return {x, norm, kInversionMaxIterations};
  throw ConvergenceFailure("invert_map: damped Newton stalled at residual " +
                           detail::sci(norm));
}

Eigen::MatrixXd forward_map(const PeriodicPotential& u) {
  require_convex(u, "forward_map");
  const Spectrum<double> spectrum(u.samples());
  const TorusGrid& grid = u.grid();
  Eigen::MatrixXd y(grid.num_nodes(), grid.dims());
  for (int k = 0; k < grid.dims(); ++k) {
    MultiIndex alpha{0, 0, 0};
    alpha[k] = 1;
    y.col(k) = spectrum.derivative(alpha).values();
  }
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
    y.row(i) += grid.node(i).transpose();
  }
  return y;
}

Point invert_map(const PeriodicPotential& u, const Point& y) {
  return LegendreMap(u).invert(y).x;
}

namespace {

Eigen::VectorXd metric_determinants(const PeriodicField<double>& field) {
  const HessianField<double> hess(field);
  Eigen::VectorXd det(field.grid().num_nodes());
  for (Eigen::Index i = 0; i < det.size(); ++i) det(i) = hess.metric(i).determinant();
  return det;
}

}  // namespace

TransformPair partial_transform(const PeriodicPotential& u) {
  const LegendreMap map(u);
  const TorusGrid& grid = u.grid();
  const Eigen::Index nodes = grid.num_nodes();
  Eigen::VectorXd f(nodes);
  Eigen::MatrixXd x_of_y(nodes, grid.dims());
  parallel_for(nodes, [&](long i) {
    const Point y = grid.node(i);
    const Point x = map.invert(y).x;
    f(i) = -0.5 * (x - y).squaredNorm() - map.interpolant()(x);
    x_of_y.row(i) = x.transpose();
  });
  TransformPair pair{u, PeriodicPotential(PeriodicField<double>(grid, std::move(f))),
                     std::move(x_of_y), metric_determinants(u.samples()), {}};
  pair.det_h = metric_determinants(pair.f.samples());
  return pair;
}

PeriodicPotential inverse_transform(const TransformPair& pair) {
  return partial_transform(pair.f).f;
}

double reciprocity_error(const TransformPair& pair) {
  const TrigInterpolant<double> interp(pair.u.samples());
  const Eigen::Index nodes = pair.f.grid().num_nodes();
  Eigen::VectorXd err(nodes);
  parallel_for(nodes, [&](long i) {
    Matrix g = interp.jet(pair.x_of_y.row(i).transpose()).hessian;
    g.diagonal().array() += 1.0;
    err(i) = std::abs(g.determinant() * pair.det_h(i) - 1.0);
  });
  return err.maxCoeff();
}

double jacobian_consistency_error(const TransformPair& pair) {
  const TorusGrid& grid = pair.f.grid();
  const int n = grid.dims();
  const Eigen::Index nodes = grid.num_nodes();
  // x(y) - y is periodic; its spectral gradient plus I is dx/dy
  std::vector<std::vector<PeriodicField<double>>> dx(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd disp(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) disp(i) = pair.x_of_y(i, k) - grid.node(i)(k);
    const Spectrum<double> spectrum(PeriodicField<double>(grid, std::move(disp)));
    for (int j = 0; j < n; ++j) {
      MultiIndex alpha{0, 0, 0};
      alpha[j] = 1;
      dx[k].push_back(spectrum.derivative(alpha));
    }
  }
  const TrigInterpolant<double> interp(pair.u.samples());
  Eigen::VectorXd err(nodes);
  parallel_for(nodes, [&](long i) {
    Matrix g = interp.jet(pair.x_of_y.row(i).transpose()).hessian;
    g.diagonal().array() += 1.0;
    const Matrix ginv = g.inverse();
    double e = 0;
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        const double jac = dx[k][j][i] + (j == k ? 1.0 : 0.0);
        e = std::max(e, std::abs(jac - ginv(k, j)));
      }
    }
    err(i) = e;
  });
  return err.maxCoeff();
}

StripPair partial_transform_strip(const StripField& u) {
  const TorusGrid& grid = u.grid();
  const int slices = u.num_slices();
  StripPair out{u, StripField(grid, u.intervals()), {}, {}, {}};
  for (int k = 0; k < grid.dims(); ++k) {
    out.x_of_ys.emplace_back(grid, u.intervals());
  }
  std::vector<PeriodicPotential> potentials;
  potentials.reserve(slices);
  for (int j = 0; j < slices; ++j) {
    potentials.emplace_back(u.slice(j));
    if (!potentials.back().is_convex()) {
      throw SliceNotConvex(j, potentials.back().margin());
    }
    out.margins_u.push_back(potentials.back().margin());
  }
  for (int j = 0; j < slices; ++j) {
    TransformPair pair = partial_transform(potentials[j]);
    out.f.set_slice(j, pair.f.values());
    out.margins_f.push_back(pair.f.margin());
    for (int k = 0; k < grid.dims(); ++k) {
      out.x_of_ys[k].set_slice(j, pair.x_of_y.col(k));
    }
  }
  return out;
}

}  // namespace pleg

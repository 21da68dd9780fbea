#include "pleg/errors.hpp"
#include "pleg/solver_1p1.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>
#include <vector>

namespace pleg {

namespace {

// Centred second differences on a periodic-in-x, Dirichlet-in-t grid.
struct Discretization {
  int N;
  int M;
  double hx;
  double ht;

  int wrap(int i) const { return (i % N + N) % N; }

  double dtt(const Eigen::MatrixXd& u, int i, int j) const {
    return (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) / (ht * ht);
  }
  double dxx(const Eigen::MatrixXd& u, int i, int j) const {
    return (u(wrap(i + 1), j) - 2 * u(i, j) + u(wrap(i - 1), j)) / (hx * hx);
  }
  double dxt(const Eigen::MatrixXd& u, int i, int j) const {
    const int p = wrap(i + 1), m = wrap(i - 1);
    return (u(p, j + 1) - u(p, j - 1) - u(m, j + 1) + u(m, j - 1)) / (4 * hx * ht);
  }

  Eigen::VectorXd residual(const Eigen::MatrixXd& u, double eps) const {
    Eigen::VectorXd r(N * (M - 1));
    for (int j = 1; j < M; ++j) {
      for (int i = 0; i < N; ++i) {
        const double c = dxt(u, i, j);
        r((j - 1) * N + i) = dtt(u, i, j) * (1 + dxx(u, i, j)) - c * c - eps;
      }
    }
    return r;
  }

  double min_convexity(const Eigen::MatrixXd& u) const {
    double m = INFINITY;
    for (int j = 0; j <= M; ++j) {
      for (int i = 0; i < N; ++i) m = std::min(m, 1 + dxx(u, i, j));
    }
    return m;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::MatrixXd& u) const {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<size_t>(N) * (M - 1) * 9);
    for (int j = 1; j < M; ++j) {
      for (int i = 0; i < N; ++i) {
        const int row = (j - 1) * N + i;
        const double A = dtt(u, i, j);
        const double B = 1 + dxx(u, i, j);
        const double C = dxt(u, i, j);
        auto add = [&](int ii, int jj, double w) {
          if (jj <= 0 || jj >= M) return;
          entries.emplace_back(row, (jj - 1) * N + wrap(ii), w);
        };
        const double wt = B / (ht * ht);
        add(i, j + 1, wt);
        add(i, j - 1, wt);
        add(i, j, -2 * wt - 2 * A / (hx * hx));
        const double wx = A / (hx * hx);
        add(i + 1, j, wx);
        add(i - 1, j, wx);
        const double wc = -2 * C / (4 * hx * ht);
        add(i + 1, j + 1, wc);
        add(i + 1, j - 1, -wc);
        add(i - 1, j + 1, -wc);
        add(i - 1, j - 1, wc);
      }
    }
    Eigen::SparseMatrix<double> J(N * (M - 1), N * (M - 1));
    J.setFromTriplets(entries.begin(), entries.end());
    return J;
  }
};

Discretization discretization(const StripField& u) {
  const int N = u.grid().size(0);
  return {N, u.intervals(), 1.0 / N, u.spacing()};
}

}  // namespace

double fd_residual(const StripField& u, double epsilon) {
  return discretization(u).residual(u.samples(), epsilon).cwiseAbs().maxCoeff();
}

StripField fd_reference_solver(const BoundaryData& b, double epsilon,
                               const FdOptions& options) {
  const TorusGrid& grid = b.u0.grid();
  const int M = options.intervals > 0 ? options.intervals : grid.size(0);
  StripField field(grid, M);
  for (int j = 0; j <= M; ++j) {
    const double t = field.level(j);
    field.set_slice(j, (1 - t) * b.u0.values() + t * b.u1.values() +
                           Eigen::VectorXd::Constant(grid.num_nodes(),
                                                     epsilon * t * (t - 1) / 2));
  }
  field.samples().col(0) = b.u0.values();
  field.samples().col(M) = b.u1.values();

  const Discretization d = discretization(field);
  Eigen::MatrixXd& u = field.samples();
  if (d.min_convexity(u) <= 0) {
    throw ConvexityLost("initial guess is not convex");
  }
  Eigen::VectorXd r = d.residual(u, epsilon);
  double norm = r.cwiseAbs().maxCoeff();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int step = 0; step < options.max_steps; ++step) {
    if (norm <= options.tolerance) return field;
    const Eigen::SparseMatrix<double> J = d.jacobian(u);
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw ConvergenceFailure("singular Newton matrix at step " +
                               std::to_string(step));
    }
    const Eigen::VectorXd delta = lu.solve(-r);
    double alpha = 1;
    bool convex_seen = false;
    bool accepted = false;
    for (int halving = 0; halving < 30 && !accepted; ++halving, alpha /= 2) {
      Eigen::MatrixXd trial = u;
      for (int j = 1; j < M; ++j) {
        trial.col(j) += alpha * delta.segment((j - 1) * d.N, d.N);
      }
      if (d.min_convexity(trial) <= 0) continue;
      convex_seen = true;
      const Eigen::VectorXd trial_r = d.residual(trial, epsilon);
      const double trial_norm = trial_r.cwiseAbs().maxCoeff();
      if (trial_norm < norm) {
        u = std::move(trial);
        r = trial_r;
        norm = trial_norm;
        accepted = true;
      }
    }
    if (!accepted) {
      if (!convex_seen) throw ConvexityLost("every damped step left the convex cone");
      throw ConvergenceFailure("damped Newton stalled at residual " +
                               detail::sci(norm));
    }
  }
  if (norm <= options.tolerance) return field;
  throw ConvergenceFailure("no convergence in " + std::to_string(options.max_steps) +
                           " Newton steps, residual " + detail::sci(norm));
}

}  // namespace pleg

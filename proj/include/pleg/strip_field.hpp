#pragma once

// Scalar fields on torus x [0, 1], stored as M + 1 equispaced slices.

#include "pleg/torus_field.hpp"

#include <Eigen/Dense>

namespace pleg {

class StripField {
 public:
  StripField() = default;
  /// Zero field with M + 1 slices at levels j / M.
  StripField(TorusGrid grid, int intervals);
  /// Columns of `samples` are slices.
  StripField(TorusGrid grid, Eigen::MatrixXd samples);

  /// Samples fn(x, t) at every node and level.
  template <typename Fn>
  static StripField from_function(const TorusGrid& grid, int intervals,
                                  Fn&& fn) {
    StripField out(grid, intervals);
    for (int j = 0; j <= intervals; ++j) {
      const double t = out.level(j);
      for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
        out.samples_(i, j) = fn(grid.node(i), t);
      }
    }
    return out;
  }

  const TorusGrid& grid() const { return grid_; }
  int intervals() const { return static_cast<int>(samples_.cols()) - 1; }
  int num_slices() const { return static_cast<int>(samples_.cols()); }
  double spacing() const { return 1.0 / intervals(); }
  double level(int j) const { return static_cast<double>(j) / intervals(); }

  PeriodicField<double> slice(int j) const {
    return PeriodicField<double>(grid_, samples_.col(j));
  }
  void set_slice(int j, const Eigen::VectorXd& values) {
    samples_.col(j) = values;
  }

  const Eigen::MatrixXd& samples() const { return samples_; }
  Eigen::MatrixXd& samples() { return samples_; }

 private:
  TorusGrid grid_;
  Eigen::MatrixXd samples_;
};

/// Derivative of the given order along t by finite differences of the
/// given formal accuracy (centred in the interior, one-sided near ends).
StripField t_derivative(const StripField& field, int order, int accuracy = 2);

/// Slice-wise spectral derivative in the periodic directions.
StripField x_derivative(const StripField& field, const MultiIndex& alpha);

inline double sup_norm(const StripField& field) {
  return field.samples().size() == 0 ? 0.0
                                     : field.samples().cwiseAbs().maxCoeff();
}

}  // namespace pleg

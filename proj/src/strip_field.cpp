#include "pleg/strip_field.hpp"

#include "pleg/finite_difference.hpp"
#include "pleg/parallel.hpp"

#include <stdexcept>

namespace pleg {

StripField::StripField(TorusGrid grid, int intervals)
    : grid_(std::move(grid)),
      samples_(Eigen::MatrixXd::Zero(grid_.num_nodes(), intervals + 1)) {
  if (intervals < 2) {
    throw std::invalid_argument("StripField: need at least 3 slices");
  }
}

StripField::StripField(TorusGrid grid, Eigen::MatrixXd samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.rows() != grid_.num_nodes()) {
    throw std::invalid_argument("StripField: sample rows must match grid");
  }
  if (samples_.cols() < 3) {
    throw std::invalid_argument("StripField: need at least 3 slices");
  }
}

StripField t_derivative(const StripField& field, int order, int accuracy) {
  const auto plan = fd::plan_stencils(field.intervals(), field.spacing(), order,
                                      accuracy);
  Eigen::MatrixXd out(field.samples().rows(), field.samples().cols());
  for (int j = 0; j <= field.intervals(); ++j) {
    const auto& s = plan[j];
    out.col(j).setZero();
    for (size_t k = 0; k < s.weights.size(); ++k) {
      out.col(j) += s.weights[k] * field.samples().col(s.first + static_cast<int>(k));
    }
  }
  return StripField(field.grid(), std::move(out));
}

StripField x_derivative(const StripField& field, const MultiIndex& alpha) {
  Eigen::MatrixXd out(field.samples().rows(), field.samples().cols());
  parallel_for(field.num_slices(), [&](long j) {
    out.col(j) = spectral_derivative(field.slice(static_cast<int>(j)), alpha).values();
  });
  return StripField(field.grid(), std::move(out));
}

}  // namespace pleg

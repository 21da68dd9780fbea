#include "pleg/solver_1p1.hpp"

#include "pleg/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pleg {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2 * std::numbers::pi;

// sinh(mu s) / sinh(mu) and cosh(mu s) / sinh(mu), scaled by exp(mu (s - 1))
// so neither numerator nor denominator overflows
double sinh_ratio(double mu, double s) {
  return std::exp(mu * (s - 1)) * -std::expm1(-2 * mu * s) / -std::expm1(-2 * mu);
}

double cosh_ratio(double mu, double s) {
  return std::exp(mu * (s - 1)) * (1 + std::exp(-2 * mu * s)) / -std::expm1(-2 * mu);
}

std::vector<Complex> dft(const Eigen::VectorXd& values) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(values.data(), values.data() + values.size());
  std::vector<Complex> out;
  fft.fwd(out, in);
  return out;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0 && epsilon <= 1)) {
    throw std::invalid_argument("epsilon must lie in (0, 1], got " +
                                detail::sci(epsilon));
  }
}

}  // namespace

BoundaryData BoundaryData::make(PeriodicPotential u0, PeriodicPotential u1) {
  if (u0.grid().dims() != 1 || !(u0.grid() == u1.grid())) {
    throw std::invalid_argument(
        "boundary potentials must share a one-dimensional grid");
  }
  if (!u0.is_convex() || !u1.is_convex()) {
    throw std::invalid_argument("boundary potentials must have positive margin");
  }
  const double lambda = std::min(u0.margin(), u1.margin());
  return {std::move(u0), std::move(u1), lambda};
}

std::pair<PeriodicPotential, PeriodicPotential> transform_boundary(
    const BoundaryData& b) {
  if (!(b.lambda > 0)) {
    throw std::invalid_argument("transform_boundary: lambda must be positive");
  }
  return {partial_transform(b.u0).f, partial_transform(b.u1).f};
}

DualLaplaceSolution::DualLaplaceSolution(const PeriodicField<double>& f0,
                                         const PeriodicField<double>& f1,
                                         double epsilon)
    : grid_(f0.grid()), epsilon_(epsilon) {
  require_epsilon(epsilon);
  if (grid_.dims() != 1 || !(f1.grid() == grid_)) {
    throw std::invalid_argument(
        "dual boundary data must share a one-dimensional grid");
  }
  a_ = dft(f0.values());
  b_ = dft(f1.values().array() + epsilon / 2);
}

std::vector<Complex> DualLaplaceSolution::mode_values(double s, int k) const {
  const int n = grid_.size(0);
  const double root = std::sqrt(epsilon_);
  std::vector<Complex> c(n);
  for (int j = 0; j < n; ++j) {
    const int kw = std::abs(wavenumber(j, n));
    if (kw == 0) {
      c[j] = k == 0 ? a_[j] * (1 - s) + b_[j] * s
           : k == 1 ? b_[j] - a_[j]
                    : Complex(0);
      continue;
    }
    const double mu = kTwoPi * kw * root;
    const double scale = std::pow(mu, k);
    if (k % 2 == 0) {
      c[j] = scale * (a_[j] * sinh_ratio(mu, 1 - s) + b_[j] * sinh_ratio(mu, s));
    } else {
      c[j] = scale * (-a_[j] * cosh_ratio(mu, 1 - s) + b_[j] * cosh_ratio(mu, s));
    }
  }
  return c;
}

Eigen::VectorXd DualLaplaceSolution::homogeneous(double s, int m, int k) const {
  const int n = grid_.size(0);
  std::vector<Complex> c = mode_values(s, k);
  for (int j = 0; j < n; ++j) {
    if (m % 2 == 1 && j == n / 2) {
      c[j] = 0;
    } else {
      c[j] *= std::pow(Complex(0, kTwoPi * wavenumber(j, n)), m);
    }
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.inv(out, c);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = out[i].real();
  return v;
}

Eigen::VectorXd DualLaplaceSolution::dual(double s, int m, int k) const {
  Eigen::VectorXd v = homogeneous(s, m, k);
  if (m == 0) {
    const double gauge = k == 0 ? epsilon_ * s * s / 2
                       : k == 1 ? epsilon_ * s
                       : k == 2 ? epsilon_
                                : 0.0;
    v.array() -= gauge;
  }
  return v;
}

double DualLaplaceSolution::homogeneous_at(double y, double s, int m,
                                           int k) const {
  const int n = grid_.size(0);
  const std::vector<Complex> c = mode_values(s, k);
  double sum = 0;
  for (int j = 0; j < n; ++j) {
    if (j == n / 2) {
      const double w = std::numbers::pi * n;
      sum += c[j].real() * std::pow(w, m) *
             std::cos(w * y + m * std::numbers::pi / 2);
      continue;
    }
    const double w = kTwoPi * wavenumber(j, n);
    sum += (c[j] * std::pow(Complex(0, w), m) * std::polar(1.0, w * y)).real();
  }
  return sum / n;
}

StripField DualLaplaceSolution::sample(int intervals) const {
  StripField f(grid_, intervals);
  for (int j = 0; j <= intervals; ++j) f.set_slice(j, dual(f.level(j)));
  return f;
}

StripField DualLaplaceSolution::sample_homogeneous(int intervals) const {
  StripField f(grid_, intervals);
  for (int j = 0; j <= intervals; ++j) f.set_slice(j, homogeneous(f.level(j)));
  return f;
}

DualLaplaceSolution solve_dual_laplace(const PeriodicPotential& f0,
                                       const PeriodicPotential& f1,
                                       double epsilon) {
  return DualLaplaceSolution(f0.samples(), f1.samples(), epsilon);
}

StripField recover_u(const StripField& f) {
  StripField u(f.grid(), f.intervals());
  for (int j = 0; j < f.num_slices(); ++j) {
    const PeriodicPotential slice(f.slice(j));
    if (!slice.is_convex()) throw SliceNotConvex(j, slice.margin());
    u.set_slice(j, partial_transform(slice).f.values());
  }
  return u;
}

StripField residual_ma(const StripField& u, double epsilon) {
  const StripField utt = t_derivative(u, 2, 4);
  const StripField uxx = x_derivative(u, {2, 0, 0});
  const StripField uxt = x_derivative(t_derivative(u, 1, 4), {1, 0, 0});
  StripField r = utt;
  r.samples() = utt.samples().cwiseProduct((uxx.samples().array() + 1).matrix()) -
                uxt.samples().cwiseAbs2();
  r.samples().array() -= epsilon;
  return r;
}

DualSolveResult solve_1p1(const BoundaryData& b, double epsilon,
                          const SolveOptions& options) {
  require_epsilon(epsilon);
  const int M = options.intervals > 0 ? options.intervals : b.u0.grid().size(0);
  const auto [f0, f1] = transform_boundary(b);

  DualSolveResult out;
  out.epsilon = epsilon;
  out.lambda = b.lambda;
  out.dual.emplace(solve_dual_laplace(f0, f1, epsilon));
  out.f = out.dual->sample(M);
  out.u = recover_u(out.f);

  const double boundary_error =
      std::max((out.u.samples().col(0) - b.u0.values()).cwiseAbs().maxCoeff(),
               (out.u.samples().col(M) - b.u1.values()).cwiseAbs().maxCoeff());
  if (boundary_error > options.boundary_tolerance) {
    throw InvariantViolation("recovered u misses the boundary data by " +
                             detail::sci(boundary_error));
  }
  out.margin_min = 1 + x_derivative(out.u, {2, 0, 0}).samples().minCoeff();
  if (out.margin_min < b.lambda - options.margin_tolerance) {
    throw InvariantViolation("margin " + detail::sci(out.margin_min) +
                             " below lambda " + detail::sci(b.lambda));
  }
  out.residual_ma = sup_norm(residual_ma(out.u, epsilon));
  if (out.residual_ma > options.residual_bound) {
    throw ResidualTooLarge("residual " + detail::sci(out.residual_ma) +
                           " above bound " + detail::sci(options.residual_bound));
  }
  return out;
}

}  // namespace pleg

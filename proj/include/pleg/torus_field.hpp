#pragma once

// Periodic fields on the unit torus (R/Z)^n sampled on uniform grids, with
// exact differentiation and evaluation of their trigonometric interpolants.

#include "pleg/linalg.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pleg {

using MultiIndex = std::array<int, kMaxDims>;

/// Uniform grid on the unit torus; nodes j * (1 / N_d) per direction.
class TorusGrid {
 public:
  TorusGrid() = default;
  explicit TorusGrid(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty() || sizes_.size() > static_cast<size_t>(kMaxDims)) {
      throw std::invalid_argument("TorusGrid: dimension must be 1..3");
    }
    for (int n : sizes_) {
      if (n < 8 || n % 2 != 0) {
        throw std::invalid_argument("TorusGrid: sizes must be even and >= 8, got " +
                                    std::to_string(n));
      }
    }
  }
  /// n-dimensional grid with the same size in every direction.
  static TorusGrid cube(int dims, int size) {
    return TorusGrid(std::vector<int>(dims, size));
  }

  int dims() const { return static_cast<int>(sizes_.size()); }
  int size(int d) const { return sizes_[d]; }
  const std::vector<int>& sizes() const { return sizes_; }
  double spacing(int d) const { return 1.0 / sizes_[d]; }
  Eigen::Index num_nodes() const {
    return std::accumulate(sizes_.begin(), sizes_.end(), Eigen::Index{1},
                           std::multiplies<>());
  }

  /// Row-major multi-index of a flat node index (last direction fastest).
  MultiIndex unflatten(Eigen::Index flat) const {
    MultiIndex idx{0, 0, 0};
    for (int d = dims() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % sizes_[d]);
      flat /= sizes_[d];
    }
    return idx;
  }
  Eigen::Index flatten(const MultiIndex& idx) const {
    Eigen::Index flat = 0;
    for (int d = 0; d < dims(); ++d) {
      const int n = sizes_[d];
      flat = flat * n + ((idx[d] % n) + n) % n;
    }
    return flat;
  }
  Point node(Eigen::Index flat) const {
    const MultiIndex idx = unflatten(flat);
    Point x(dims());
    for (int d = 0; d < dims(); ++d) x(d) = idx[d] * spacing(d);
    return x;
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  std::vector<int> sizes_;
};

/// Signed wavenumber stored at DFT index j of an axis of size n; the
/// Nyquist index n/2 reports +n/2.
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Node samples of a real periodic field.
template <typename Scalar>
class PeriodicField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PeriodicField() = default;
  PeriodicField(TorusGrid grid, Vector values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.num_nodes()) {
      throw std::invalid_argument("PeriodicField: sample count mismatch");
    }
  }
  /// Samples fn(x) at every node.
  template <typename Fn>
  static PeriodicField from_function(const TorusGrid& grid, Fn&& fn) {
    Vector v(grid.num_nodes());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = fn(grid.node(i));
    return PeriodicField(grid, std::move(v));
  }
  static PeriodicField constant(const TorusGrid& grid, Scalar c) {
    return PeriodicField(grid, Vector::Constant(grid.num_nodes(), c));
  }

  const TorusGrid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Scalar operator[](Eigen::Index i) const { return values_(i); }

 private:
  TorusGrid grid_;
  Vector values_;
};

namespace detail {

template <typename Scalar>
void fft_axis(std::vector<std::complex<Scalar>>& data, const TorusGrid& grid,
              int axis, bool inverse) {
  const int n = grid.size(axis);
  Eigen::Index stride = 1;
  for (int d = axis + 1; d < grid.dims(); ++d) stride *= grid.size(d);
  const Eigen::Index block = stride * n;
  const Eigen::Index total = static_cast<Eigen::Index>(data.size());
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> line(n), out(n);
  for (Eigen::Index outer = 0; outer < total; outer += block) {
    for (Eigen::Index inner = 0; inner < stride; ++inner) {
      for (int j = 0; j < n; ++j) line[j] = data[outer + inner + j * stride];
      if (inverse) {
        fft.inv(out, line);
      } else {
        fft.fwd(out, line);
      }
      for (int j = 0; j < n; ++j) data[outer + inner + j * stride] = out[j];
    }
  }
}

}  // namespace detail

/// Discrete Fourier coefficients of a field, computed once and reused for
/// any number of derivatives or interpolants.
template <typename Scalar>
class Spectrum {
 public:
  using Complex = std::complex<Scalar>;

  explicit Spectrum(const PeriodicField<Scalar>& field) : grid_(field.grid()) {
    coeffs_.assign(field.values().data(),
                   field.values().data() + field.values().size());
    for (int d = 0; d < grid_.dims(); ++d) {
      detail::fft_axis(coeffs_, grid_, d, false);
    }
  }

  const TorusGrid& grid() const { return grid_; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }

  /// Node values of the derivative of order alpha of the interpolant.
  /// Odd derivatives drop the Nyquist coefficient (its sine derivative
  /// vanishes on the nodes); even ones keep it.
  PeriodicField<Scalar> derivative(const MultiIndex& alpha) const {
    for (int d = 0; d < kMaxDims; ++d) {
      if (alpha[d] < 0) {
        throw std::invalid_argument("spectral_derivative: negative order");
      }
      if (d >= grid_.dims() && alpha[d] != 0) {
        throw std::invalid_argument(
            "spectral_derivative: order beyond grid dimension");
      }
    }
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    std::vector<std::vector<Complex>> factors(grid_.dims());
    for (int d = 0; d < grid_.dims(); ++d) {
      const int n = grid_.size(d);
      factors[d].resize(n);
      for (int j = 0; j < n; ++j) {
        if (alpha[d] % 2 == 1 && j == n / 2) {
          factors[d][j] = Complex(0);
        } else {
          factors[d][j] =
              std::pow(Complex(0, two_pi * wavenumber(j, n)), alpha[d]);
        }
      }
    }
    std::vector<Complex> work(coeffs_.size());
    for (size_t flat = 0; flat < coeffs_.size(); ++flat) {
      const MultiIndex idx = grid_.unflatten(static_cast<Eigen::Index>(flat));
      Complex f(1);
      for (int d = 0; d < grid_.dims(); ++d) f *= factors[d][idx[d]];
      work[flat] = coeffs_[flat] * f;
    }
    for (int d = 0; d < grid_.dims(); ++d) {
      detail::fft_axis(work, grid_, d, true);
    }
    typename PeriodicField<Scalar>::Vector v(work.size());
    for (size_t i = 0; i < work.size(); ++i) v(i) = work[i].real();
    return PeriodicField<Scalar>(grid_, std::move(v));
  }

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

template <typename Scalar>
PeriodicField<Scalar> spectral_derivative(const PeriodicField<Scalar>& field,
                                          const MultiIndex& alpha) {
  return Spectrum<Scalar>(field).derivative(alpha);
}

/// Value, gradient and Hessian of an interpolant at one point.
template <typename Scalar>
struct Jet {
  Scalar value;
  PointN<Scalar> gradient;
  MatrixN<Scalar> hessian;
};

/// The trigonometric interpolant of a field, evaluated by direct summation
/// of the full Fourier series. The Nyquist term is the real cos(pi N x)
/// mode, so the interpolant is real and reproduces every node value.
template <typename Scalar>
class TrigInterpolant {
 public:
  using Complex = std::complex<Scalar>;

  explicit TrigInterpolant(const PeriodicField<Scalar>& field)
      : TrigInterpolant(Spectrum<Scalar>(field)) {}
  explicit TrigInterpolant(const Spectrum<Scalar>& spectrum)
      : grid_(spectrum.grid()) {
    // The field is real, so the sum over the last axis folds onto its
    // non-negative half (weight 2 off the ends) with the real part taken at
    // the end of the contraction.
    const Scalar scale = Scalar(1) / static_cast<Scalar>(grid_.num_nodes());
    const int last = grid_.size(grid_.dims() - 1);
    half_ = last / 2 + 1;
    const Eigen::Index rows = grid_.num_nodes() / last;
    coeffs_.resize(rows * half_);
    const auto& full = spectrum.coefficients();
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int j = 0; j < half_; ++j) {
        const Scalar w = (j == 0 || j == last / 2) ? scale : 2 * scale;
        coeffs_[r * half_ + j] = w * full[r * last + j];
      }
    }
  }

  const TorusGrid& grid() const { return grid_; }

  Scalar operator()(const PointN<Scalar>& x) const {
    const int n = grid_.dims();
    std::array<AxisBasis, kMaxDims> basis;
    for (int d = 0; d < n; ++d) basis[d] = axis_basis(d, x(d), 0);
    return collapse(contract_last(basis[n - 1][0]), basis, {0, 0, 0});
  }

  Jet<Scalar> jet(const PointN<Scalar>& x) const {
    const int n = grid_.dims();
    std::array<AxisBasis, kMaxDims> basis;
    for (int d = 0; d < n; ++d) basis[d] = axis_basis(d, x(d), 2);
    // the full-size sum over the last axis is shared by all derivatives
    const auto partial = contract_last_jet(basis[n - 1]);
    auto eval = [&](const MultiIndex& orders) {
      return collapse(partial[orders[n - 1]], basis, orders);
    };
    Jet<Scalar> out{eval({0, 0, 0}), PointN<Scalar>(n), MatrixN<Scalar>(n, n)};
    for (int a = 0; a < n; ++a) {
      MultiIndex first{0, 0, 0};
      first[a] = 1;
      out.gradient(a) = eval(first);
      for (int b = a; b < n; ++b) {
        MultiIndex second{0, 0, 0};
        ++second[a];
        ++second[b];
        out.hessian(a, b) = out.hessian(b, a) = eval(second);
      }
    }
    return out;
  }

 private:
  // basis functions of one axis and their first two derivatives
  using AxisBasis = std::array<std::vector<Complex>, 3>;

  AxisBasis axis_basis(int axis, Scalar x, int max_order) const {
    const int n = grid_.size(axis);
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    x -= std::floor(x);
    AxisBasis b;
    for (int o = 0; o <= max_order; ++o) b[o].resize(n);
    const Complex w = std::polar(Scalar(1), two_pi * x);
    Complex power(1);
    for (int j = 0; j < n / 2; ++j) {
      b[0][j] = power;
      if (j > 0) b[0][n - j] = std::conj(power);
      power = fma(power, w, Complex(0));
    }
    const Scalar nyquist_arg = std::numbers::pi_v<Scalar> * n * x;
    b[0][n / 2] = Complex(std::cos(nyquist_arg));
    for (int o = 1; o <= max_order; ++o) {
      for (int j = 0; j < n; ++j) {
        if (j == n / 2) continue;
        const Complex ik(0, two_pi * wavenumber(j, n));
        b[o][j] = fma(b[o - 1][j], ik, Complex(0));
      }
    }
    const Scalar kn = std::numbers::pi_v<Scalar> * n;
    if (max_order >= 1) b[1][n / 2] = Complex(-kn * std::sin(nyquist_arg));
    if (max_order >= 2) b[2][n / 2] = Complex(-kn * kn * std::cos(nyquist_arg));
    return b;
  }

  // a * b + c without the inf/nan recovery of std::complex operator*
  static Complex fma(const Complex& a, const Complex& b, const Complex& c) {
    return {c.real() + a.real() * b.real() - a.imag() * b.imag(),
            c.imag() + a.real() * b.imag() + a.imag() * b.real()};
  }

  std::array<std::vector<Complex>, 3> contract_last_jet(const AxisBasis& b) const {
    const Eigen::Index rows = static_cast<Eigen::Index>(coeffs_.size()) / half_;
    std::array<std::vector<Complex>, 3> partial;
    for (auto& p : partial) p.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Complex* row = coeffs_.data() + r * half_;
      Complex a0(0), a1(0), a2(0);
      for (int j = 0; j < half_; ++j) {
        a0 = fma(row[j], b[0][j], a0);
        a1 = fma(row[j], b[1][j], a1);
        a2 = fma(row[j], b[2][j], a2);
      }
      partial[0][r] = a0;
      partial[1][r] = a1;
      partial[2][r] = a2;
    }
    return partial;
  }

  std::vector<Complex> contract_last(const std::vector<Complex>& b) const {
    const Eigen::Index rows = static_cast<Eigen::Index>(coeffs_.size()) / half_;
    std::vector<Complex> partial(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Complex* row = coeffs_.data() + r * half_;
      Complex acc(0);
      for (int j = 0; j < half_; ++j) acc = fma(row[j], b[j], acc);
      partial[r] = acc;
    }
    return partial;
  }

  Scalar collapse(const std::vector<Complex>& last,
                  const std::array<AxisBasis, kMaxDims>& basis,
                  const MultiIndex& orders) const {
    const Complex* partial = last.data();
    Eigen::Index size = static_cast<Eigen::Index>(last.size());
    std::array<Complex, 64> small;
    std::vector<Complex> large;
    for (int d = grid_.dims() - 2; d >= 0; --d) {
      const int n = grid_.size(d);
      const auto& bd = basis[d][orders[d]];
      const Eigen::Index outer = size / n;
      Complex* next;
      if (outer <= static_cast<Eigen::Index>(small.size()) && partial != small.data()) {
        next = small.data();
      } else {
        large.assign(outer, Complex(0));
        next = large.data();
      }
      for (Eigen::Index r = 0; r < outer; ++r) {
        Complex acc(0);
        for (int j = 0; j < n; ++j) acc = fma(partial[r * n + j], bd[j], acc);
        next[r] = acc;
      }
      partial = next;
      size = outer;
    }
    return partial[0].real();
  }

  TorusGrid grid_;
  int half_ = 0;
  std::vector<Complex> coeffs_;  // rows x half_ of the scaled spectrum
};

template <typename Scalar>
Scalar trig_interpolate(const PeriodicField<Scalar>& field,
                        const PointN<Scalar>& x) {
  return TrigInterpolant<Scalar>(field)(x);
}

template <typename Scalar>
Scalar sup_norm(const PeriodicField<Scalar>& field) {
  return field.values().size() == 0 ? Scalar(0)
                                    : field.values().cwiseAbs().maxCoeff();
}

/// Node-wise D^2 u + I from spectral second derivatives.
template <typename Scalar>
class HessianField {
 public:
  explicit HessianField(const Spectrum<Scalar>& spectrum)
      : dims_(spectrum.grid().dims()) {
    for (int a = 0; a < dims_; ++a) {
      for (int b = a; b < dims_; ++b) {
        MultiIndex alpha{0, 0, 0};
        ++alpha[a];
        ++alpha[b];
        second_[a][b] = spectrum.derivative(alpha);
      }
    }
  }
  explicit HessianField(const PeriodicField<Scalar>& field)
      : HessianField(Spectrum<Scalar>(field)) {}

  /// D^2 u + I at node i.
  MatrixN<Scalar> metric(Eigen::Index i) const {
    MatrixN<Scalar> g(dims_, dims_);
    for (int a = 0; a < dims_; ++a) {
      for (int b = a; b < dims_; ++b) {
        g(a, b) = g(b, a) = second_[a][b][i] + (a == b ? Scalar(1) : Scalar(0));
      }
    }
    return g;
  }

 private:
  int dims_;
  std::array<std::array<PeriodicField<Scalar>, kMaxDims>, kMaxDims> second_;
};

/// Minimum over nodes of the smallest eigenvalue of D^2 u + I. May be
/// non-positive; callers decide what that means.
template <typename Scalar>
Scalar hessian_margin(const PeriodicField<Scalar>& u) {
  const HessianField<Scalar> hess(u);
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < u.grid().num_nodes(); ++i) {
    margin = std::min(margin, min_eigenvalue(hess.metric(i)));
  }
  return margin;
}

/// A periodic potential u together with its convexity margin
/// min eig(D^2 u + I).
class PeriodicPotential {
 public:
  PeriodicPotential() = default;
  explicit PeriodicPotential(PeriodicField<double> samples)
      : samples_(std::move(samples)), margin_(hessian_margin(samples_)) {}
  template <typename Fn>
  static PeriodicPotential from_function(const TorusGrid& grid, Fn&& fn) {
    return PeriodicPotential(
        PeriodicField<double>::from_function(grid, std::forward<Fn>(fn)));
  }

  const PeriodicField<double>& samples() const { return samples_; }
  const TorusGrid& grid() const { return samples_.grid(); }
  const Eigen::VectorXd& values() const { return samples_.values(); }
  double operator[](Eigen::Index i) const { return samples_[i]; }
  double margin() const { return margin_; }
  bool is_convex() const { return margin_ > 0; }

 private:
  PeriodicField<double> samples_;
  double margin_ = 0;
};

}  // namespace pleg

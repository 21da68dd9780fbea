#pragma once

// Test-only oracles: analytic trigonometric polynomials evaluated by direct
// summation, and a pure bisection inverse of the 1-D gradient map. Nothing
// here goes through the FFT or interpolation code under test.

#include "pleg/torus_field.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace pleg::test {

inline constexpr double kPi = std::numbers::pi;

/// u(x) = -(a / 2 pi) cos(2 pi x), so u_x = a sin(2 pi x).
inline double cosine_potential(double a, double x) {
  return -(a / (2 * kPi)) * std::cos(2 * kPi * x);
}

/// Sum of a_m cos(2 pi k_m . x) + b_m sin(2 pi k_m . x).
struct TrigPolynomial {
  struct Mode {
    std::array<int, 3> k;
    double a;
    double b;
  };
  int dims = 1;
  std::vector<Mode> modes;

  static TrigPolynomial random(int dims, int max_wavenumber, int count,
                               std::mt19937_64& rng) {
    std::uniform_int_distribution<int> wave(-max_wavenumber, max_wavenumber);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    TrigPolynomial p{dims, {}};
    while (static_cast<int>(p.modes.size()) < count) {
      Mode m{{0, 0, 0}, amp(rng), amp(rng)};
      bool zero = true;
      for (int d = 0; d < dims; ++d) {
        m.k[d] = wave(rng);
        zero = zero && m.k[d] == 0;
      }
      if (!zero) p.modes.push_back(m);
    }
    return p;
  }

  double phase(const Mode& m, const Point& x) const {
    double s = 0;
    for (int d = 0; d < dims; ++d) s += m.k[d] * x(d);
    return 2 * kPi * s;
  }

  /// Derivative of multi-order alpha.
  double eval(const Point& x, std::array<int, 3> alpha = {0, 0, 0}) const {
    double sum = 0;
    for (const auto& m : modes) {
      int order = 0;
      double factor = 1;
      for (int d = 0; d < dims; ++d) {
        order += alpha[d];
        factor *= std::pow(2 * kPi * m.k[d], alpha[d]);
      }
      const double th = phase(m, x);
      // d^order/dth^order of a cos + b sin
      double c = std::cos(th), s = std::sin(th);
      double val;
      switch (order % 4) {
        case 0: val = m.a * c + m.b * s; break;
        case 1: val = -m.a * s + m.b * c; break;
        case 2: val = -m.a * c - m.b * s; break;
        default: val = m.a * s - m.b * c; break;
      }
      sum += factor * val;
    }
    return sum;
  }

  Matrix hessian(const Point& x) const {
    Matrix h(dims, dims);
    for (int i = 0; i < dims; ++i) {
      for (int j = 0; j < dims; ++j) {
        std::array<int, 3> alpha{0, 0, 0};
        ++alpha[i];
        ++alpha[j];
        h(i, j) = eval(x, alpha);
      }
    }
    return h;
  }

  void scale(double s) {
    for (auto& m : modes) {
      m.a *= s;
      m.b *= s;
    }
  }

  PeriodicField<double> sample(const TorusGrid& grid) const {
    return PeriodicField<double>::from_function(
        grid, [&](const Point& x) { return eval(x); });
  }
};

/// Min over the nodes of `grid` of the smallest eigenvalue of D^2 p + I,
/// from analytic Hessians and a dense eigensolver.
inline double analytic_margin(const TrigPolynomial& p, const TorusGrid& grid) {
  double m = 1e300;
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
    Matrix g = p.hessian(grid.node(i));
    g.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(g)};
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

/// Rescales p so that its analytic margin on `grid` equals `target`.
inline void scale_to_margin(TrigPolynomial& p, const TorusGrid& grid,
                            double target) {
  // margin(s p) is concave in s with margin(0) = 1; bisect on s
  double lo = 0, hi = 1;
  auto margin_at = [&](double s) {
    TrigPolynomial q = p;
    q.scale(s);
    return analytic_margin(q, grid);
  };
  while (margin_at(hi) > target) hi *= 2;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (margin_at(mid) > target ? lo : hi) = mid;
  }
  p.scale(0.5 * (lo + hi));
}

/// Root of x + du(x) = y for an increasing scalar map, by plain bisection.
template <typename Derivative>
double bisection_inverse(Derivative&& du, double y) {
  double lo = y - 1.0, hi = y + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid + du(mid) - y < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pleg::test

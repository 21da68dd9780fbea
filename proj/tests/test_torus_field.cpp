#include "doctest.h"
#include "pleg/torus_field.hpp"
#include "test_support.hpp"

#include <random>

using namespace pleg;
using pleg::test::kPi;
using pleg::test::TrigPolynomial;

namespace {

PeriodicField<double> sample1d(int n, auto&& fn) {
  return PeriodicField<double>::from_function(
      TorusGrid({n}), [&](const Point& x) { return fn(x(0)); });
}

double max_abs_diff(const PeriodicField<double>& f, auto&& ref) {
  double e = 0;
  for (Eigen::Index i = 0; i < f.grid().num_nodes(); ++i) {
    e = std::max(e, std::abs(f[i] - ref(f.grid().node(i))));
  }
  return e;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TorusGrid({7}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid({6}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid({8, 8, 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid(std::vector<int>{}), std::invalid_argument);
  const TorusGrid g({8, 16});
  CHECK(g.num_nodes() == 128);
  CHECK(g.flatten(g.unflatten(77)) == 77);
  CHECK(g.node(17)(0) == doctest::Approx(0.125));
  CHECK(g.node(17)(1) == doctest::Approx(1.0 / 16));
}

TEST_CASE("spectral_derivative examples") {
  const auto c2 = sample1d(32, [](double y) { return std::cos(2 * kPi * y); });
  const auto d1 = spectral_derivative(c2, {1});
  CHECK(max_abs_diff(d1, [](const Point& x) {
          return -2 * kPi * std::sin(2 * kPi * x(0));
        }) < 1e-12);

  const auto c = PeriodicField<double>::constant(TorusGrid({16, 8}), 3.0);
  CHECK(sup_norm(spectral_derivative(c, {1, 0})) < 1e-14);
  CHECK(sup_norm(spectral_derivative(c, {2, 3})) < 1e-12);

  const auto c4 = sample1d(32, [](double y) { return std::cos(4 * kPi * y); });
  const auto d2 = spectral_derivative(c4, {2});
  CHECK(max_abs_diff(d2, [](const Point& x) {
          return -16 * kPi * kPi * std::cos(4 * kPi * x(0));
        }) < 1e-11);

  CHECK_THROWS_AS(spectral_derivative(c2, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(spectral_derivative(c2, {0, 1}), std::invalid_argument);
}

TEST_CASE("Nyquist mode: odd derivatives vanish on nodes, even ones keep it") {
  const int n = 16;
  const auto nyq = sample1d(n, [&](double y) { return std::cos(kPi * n * y); });
  CHECK(sup_norm(spectral_derivative(nyq, {1})) < 1e-12);
  const auto d2 = spectral_derivative(nyq, {2});
  CHECK(max_abs_diff(d2, [&](const Point& x) {
          return -kPi * kPi * n * n * std::cos(kPi * n * x(0));
        }) < 1e-9);
  // interpolant is cos(pi N x), real between nodes
  Point x(1);
  x(0) = 0.3 / n;
  CHECK(trig_interpolate(nyq, x) == doctest::Approx(std::cos(kPi * 0.3)).epsilon(1e-13));
}

TEST_CASE("trig_interpolate examples") {
  const auto c2 = sample1d(16, [](double y) { return std::cos(2 * kPi * y); });
  Point x(1);
  x(0) = 0.125;
  CHECK(std::abs(trig_interpolate(c2, x) - std::sqrt(0.5)) < 1e-14);
  x(0) = 0.125 + 3.0;  // reduced mod 1
  CHECK(std::abs(trig_interpolate(c2, x) - std::sqrt(0.5)) < 1e-13);

  const auto three = PeriodicField<double>::constant(TorusGrid({8, 8}), 3.0);
  Point p(2);
  p << 0.123, -7.77;
  CHECK(trig_interpolate(three, p) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("trig_interpolate matches direct Fourier summation off-grid") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-2.0, 3.0);
  for (int dims : {1, 2, 3}) {
    const TorusGrid grid = TorusGrid::cube(dims, dims == 3 ? 8 : 16);
    const auto poly = TrigPolynomial::random(dims, grid.size(0) / 2 - 1, 6, rng);
    const TrigInterpolant<double> interp(poly.sample(grid));
    double err = 0;
    for (int k = 0; k < 100; ++k) {
      Point x(dims);
      for (int d = 0; d < dims; ++d) x(d) = coord(rng);
      err = std::max(err, std::abs(interp(x) - poly.eval(x)));
      // jet against analytic derivatives
      const auto jet = interp.jet(x);
      for (int d = 0; d < dims; ++d) {
        std::array<int, 3> a{0, 0, 0};
        a[d] = 1;
        CHECK(std::abs(jet.gradient(d) - poly.eval(x, a)) < 1e-10);
      }
      CHECK((jet.hessian - poly.hessian(x)).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("differentiate then interpolate equals analytic derivative") {
  std::mt19937_64 rng(7);
  const TorusGrid grid({32});
  const auto poly = TrigPolynomial::random(1, 15, 5, rng);
  const auto d = spectral_derivative(poly.sample(grid), {1});
  const TrigInterpolant<double> interp(d);
  double scale = 0;
  double err = 0;
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Point x(1);
    x(0) = coord(rng);
    const double ref = poly.eval(x, {1, 0, 0});
    scale = std::max(scale, std::abs(ref));
    err = std::max(err, std::abs(interp(x) - ref));
  }
  CHECK(err < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("spectral derivatives are exact: refining the grid changes nothing") {
  std::mt19937_64 rng(11);
  const auto poly = TrigPolynomial::random(2, 5, 6, rng);
  const TorusGrid coarse({16, 16});
  const TorusGrid fine({32, 32});
  const auto dc = spectral_derivative(poly.sample(coarse), {1, 2});
  const auto df = spectral_derivative(poly.sample(fine), {1, 2});
  double err = 0;
  double scale = sup_norm(dc);
  for (Eigen::Index i = 0; i < coarse.num_nodes(); ++i) {
    const MultiIndex idx = coarse.unflatten(i);
    err = std::max(err, std::abs(dc[i] - df[fine.flatten({2 * idx[0], 2 * idx[1], 0})]));
  }
  CHECK(err < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("hessian_margin examples") {
  CHECK(hessian_margin(PeriodicField<double>::constant(TorusGrid({16}), 0.0)) ==
        doctest::Approx(1.0));
  CHECK(hessian_margin(PeriodicField<double>::constant(TorusGrid({8, 8, 8}), 0.0)) ==
        doctest::Approx(1.0));
  const auto u = sample1d(64, [](double x) { return test::cosine_potential(0.1, x); });
  CHECK(std::abs(hessian_margin(u) - (1 - 0.2 * kPi)) < 1e-12);
  CHECK(std::abs(hessian_margin(u) - 0.371681) < 1e-6);
}

TEST_CASE("hessian_margin matches a dense eigenvalue scan on a 4x finer grid") {
  std::mt19937_64 rng(2024);
  auto poly = TrigPolynomial::random(2, 3, 5, rng);
  const TorusGrid grid({16, 16});
  const TorusGrid fine({64, 64});
  test::scale_to_margin(poly, fine, 0.5);
  const double oracle = test::analytic_margin(poly, fine);
  CHECK(oracle > 0.2);
  CHECK(oracle < 0.8);
  CHECK(std::abs(hessian_margin(poly.sample(fine)) - oracle) < 1e-6);
  // on the coarse nodes the analytic scan agrees to roundoff
  CHECK(std::abs(hessian_margin(poly.sample(grid)) - test::analytic_margin(poly, grid)) <
        1e-10);
  CHECK(hessian_margin(poly.sample(grid)) >= oracle - 1e-12);
}

TEST_CASE("hessian_margin is invariant under grid translation") {
  std::mt19937_64 rng(5);
  const auto poly = TrigPolynomial::random(2, 4, 4, rng);
  const TorusGrid grid({16, 16});
  const auto u = poly.sample(grid);
  Eigen::VectorXd rolled(grid.num_nodes());
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
    MultiIndex idx = grid.unflatten(i);
    rolled(grid.flatten({idx[0] + 5, idx[1] + 3, 0})) = u[i];
  }
  CHECK(std::abs(hessian_margin(u) -
                 hessian_margin(PeriodicField<double>(grid, rolled))) < 1e-10);
}

TEST_CASE("PeriodicPotential records its margin") {
  const auto p = PeriodicPotential::from_function(
      TorusGrid({32}), [](const Point& x) { return test::cosine_potential(0.1, x(0)); });
  CHECK(p.is_convex());
  CHECK(p.margin() == doctest::Approx(1 - 0.2 * kPi));
  const auto bad = PeriodicPotential::from_function(
      TorusGrid({32}), [](const Point& x) { return test::cosine_potential(0.2, x(0)); });
  CHECK_FALSE(bad.is_convex());
}

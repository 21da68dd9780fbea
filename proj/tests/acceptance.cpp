// Acceptance suite: one PASS/FAIL line per criterion. Artifacts for the
// plotting scripts land in the directory given as argv[1]
// (default: acceptance_out).

#include "pleg/duality.hpp"
#include "pleg/estimates.hpp"
#include "pleg/io.hpp"
#include "pleg/legendre.hpp"
#include "pleg/solver_1p1.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace pleg;
using pleg::test::cosine_potential;
using pleg::test::kPi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

PeriodicPotential cosine(int n, double a) {
  return PeriodicPotential::from_function(
      TorusGrid({n}), [a](const Point& x) { return cosine_potential(a, x(0)); });
}

PeriodicPotential constant(int n, double c) {
  return PeriodicPotential(PeriodicField<double>::constant(TorusGrid({n}), c));
}

StripField quadratic_in_t(int dims, int N, int M, double eps) {
  return StripField::from_function(TorusGrid::cube(dims, N), M,
                                   [eps](const Point&, double t) { return eps * t * t / 2; });
}

StripField manufactured(int dims, int N, int M) {
  const double alpha = dims == 1 ? 0.01 : 0.005;
  return StripField::from_function(
      TorusGrid::cube(dims, N), M, [=](const Point& x, double t) {
        double s = 0;
        for (int d = 0; d < dims; ++d) s += std::sin(2 * kPi * x(d));
        return t * t / 2 + alpha * t * s;
      });
}

double sinh_ratio_ld(double mu, double s) {
  return static_cast<double>(std::sinh(static_cast<long double>(mu) * s) /
                             std::sinh(static_cast<long double>(mu)));
}

// shared state across criteria
struct Suite {
  std::filesystem::path out;
  std::vector<double> margins_minus_lambda;  // every accepted solve
  std::vector<std::string> max_principle_failures;
  int dual_solves = 0;
  io::Json convergence = io::Json::object();

  void record_solve(const DualSolveResult& r, const std::string& label) {
    margins_minus_lambda.push_back(r.margin_min - r.lambda);
    const MaxPrincipleReport mp = max_principle_check(*r.dual, 4, r.f.intervals());
    ++dual_solves;
    if (!mp.ok()) max_principle_failures.push_back(label);
  }
};

// three random modes with wavenumbers up to 3, scaled to margin 0.2
PeriodicPotential random_three_mode(int N) {
  std::mt19937_64 rng(2024);
  auto p = test::TrigPolynomial::random(1, 3, 3, rng);
  test::scale_to_margin(p, TorusGrid({N}), 0.2);
  return PeriodicPotential(p.sample(TorusGrid({N})));
}

std::vector<std::pair<std::string, PeriodicPotential>> involution_family() {
  const int N = 128;
  return {{"zero", constant(N, 0)},
          {"const 0.3", constant(N, 0.3)},
          {"cos:0.1", cosine(N, 0.1)},
          {"random 3-mode", random_three_mode(N)}};
}

double involution_error(const PeriodicPotential& u) {
  return (inverse_transform(partial_transform(u)).values() - u.values()).cwiseAbs().maxCoeff();
}

Outcome involution(Suite&) {
  Outcome o;
  for (const auto& [name, u] : involution_family()) {
    const double err = involution_error(u);
    o.require(err <= 1e-10, name + " " + sci(err));
  }
  if (!o.pass) o.detail += "; random 3-mode at N=1024: " + sci(involution_error(random_three_mode(1024)));
  return o;
}

Outcome reciprocity(Suite&) {
  Outcome o;
  for (const auto& [name, u] : involution_family()) {
    const double err = reciprocity_error(partial_transform(u));
    o.require(err <= 1e-8, name + " " + sci(err));
  }
  if (!o.pass) {
    o.detail += "; random 3-mode at N=1024: " +
                sci(reciprocity_error(partial_transform(random_three_mode(1024))));
  }
  return o;
}

BoundaryData cosine_boundary(int N) {
  return BoundaryData::make(cosine(N, 0.1), cosine(N, 0.1));
}

Outcome fd_oracle_duality(Suite& suite) {
  Outcome o;
  std::vector<double> sup;
  for (int N : {64, 128}) {
    const StripField u = fd_reference_solver(cosine_boundary(N), 0.1);
    const StripTransform st = make_strip_transform(u);
    sup.push_back(sup_norm(dual_ma_operator(st.f, st.K_at_y)));
    suite.convergence["dual_ma_fd_oracle"]["grids"].push_back(N);
    suite.convergence["dual_ma_fd_oracle"]["sup_norm"].push_back(sup.back());
  }
  const double ratio = sup[0] / sup[1];
  o.require(true, "64: " + sci(sup[0]) + ", 128: " + sci(sup[1]));
  o.require(ratio >= 3.5, "ratio " + fix(ratio) + " >= 3.5");
  return o;
}

const std::vector<std::string> kFiveIdentities{
    "dy_ut_plus_ds_x", "ds_ut_minus_K_over_det_g", "fs_plus_ut", "utx_from_dual",
    "utt_from_dual"};

double residual_named(const std::vector<IdentityResidual>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return r.sup_norm;
  }
  throw std::out_of_range("no identity " + name);
}

Outcome transform_identities(Suite&) {
  Outcome o;
  double closed = 0;
  for (int dims : {1, 2}) {
    const auto rs = identity_residuals(make_strip_transform(quadratic_in_t(dims, 16, 8, 0.25)));
    for (const auto& name : kFiveIdentities) closed = std::max(closed, residual_named(rs, name));
  }
  o.require(closed <= 1e-10, "closed form max " + sci(closed));
  const auto coarse = identity_residuals(make_strip_transform(manufactured(1, 128, 32)));
  const auto fine = identity_residuals(make_strip_transform(manufactured(1, 128, 64)));
  double worst = INFINITY;
  std::string worst_name;
  for (const auto& name : kFiveIdentities) {
    const double r = residual_named(coarse, name) / residual_named(fine, name);
    if (r < worst) {
      worst = r;
      worst_name = name;
    }
  }
  o.require(worst >= 3.5, "manufactured min ratio " + fix(worst) + " (" + worst_name + ")");
  return o;
}

Outcome symbol(Suite&) {
  Outcome o;
  const StripTransform st = make_strip_transform(manufactured(2, 32, 16));
  const int n = 2;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> slice(0, st.f.intervals());
  std::uniform_int_distribution<Eigen::Index> node(0, st.f.grid().num_nodes() - 1);
  std::normal_distribution<double> g;
  double min_sigma = INFINITY;
  int disagree = 0, count = 0;
  for (int p = 0; p < 100; ++p) {
    const int j = slice(rng);
    const Eigen::Index i = node(rng);
    BorderedMatrix<double> A(n + 1, n + 1);
    A(0, 0) = st.u_tt.samples()(i, j);
    Matrix h(n, n);
    for (int a = 0; a < n; ++a) {
      A(0, a + 1) = A(a + 1, 0) = st.u_tx[a].samples()(i, j);
      for (int b = 0; b < n; ++b) {
        A(a + 1, b + 1) = st.metric[a * n + b].samples()(i, j);
        h(a, b) = st.dual_metric[a * n + b].samples()(i, j);
      }
    }
    SymbolInputs in = monge_ampere_symbol_inputs(A);
    in.f_sy = Point(n);
    for (int a = 0; a < n; ++a) in.f_sy(a) = st.f_sy[a].samples()(i, j);
    in.h_inv = h.inverse();
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd v(n + 1);
      for (int c = 0; c <= n; ++c) v(c) = g(rng);
      v.normalize();
      const SymbolValue s = linearized_symbol(in, v(0), v.tail(n));
      min_sigma = std::min(min_sigma, s.value);
      disagree += s.forms_agree ? 0 : 1;
      ++count;
    }
  }
  o.require(count == 10000, std::to_string(count) + " samples");
  o.require(min_sigma > 0, "min sigma " + sci(min_sigma));
  o.require(disagree == 0, std::to_string(disagree) + " form disagreements");
  return o;
}

Outcome closed_form_dual(Suite&) {
  Outcome o;
  const int N = 256;
  const TorusGrid grid({N});
  for (double eps : {1.0, 0.1, 1e-4}) {
    // fc(., 0) = 0, fc(., 1) = cos(2 pi y) + cos(2 pi 128 y), so both the
    // lowest and the Nyquist mode are present
    const DualLaplaceSolution sol(
        PeriodicField<double>::constant(grid, 0.0),
        PeriodicField<double>::from_function(grid, [eps](const Point& x) {
          return std::cos(2 * kPi * x(0)) + std::cos(2 * kPi * 128 * x(0)) - eps / 2;
        }),
        eps);
    double err = 0;
    bool finite = true;
    for (int j = 0; j <= 32; ++j) {
      const double s = j / 32.0;
      const Eigen::VectorXd f = sol.homogeneous(s);
      finite = finite && f.allFinite();
      const double r1 = sinh_ratio_ld(2 * kPi * std::sqrt(eps), s);
      const double r128 = sinh_ratio_ld(2 * kPi * 128 * std::sqrt(eps), s);
      for (int i = 0; i < N; ++i) {
        const double y = static_cast<double>(i) / N;
        const double expect =
            std::cos(2 * kPi * y) * r1 + std::cos(2 * kPi * 128 * y) * r128;
        err = std::max(err, std::abs(f(i) - expect));
      }
    }
    o.require(finite && err <= 1e-12, "eps " + sci(eps) + " " + sci(err));
  }
  return o;
}

Outcome solver_vs_oracle(Suite& suite) {
  Outcome o;
  for (double eps : {1.0, 0.1, 0.01}) {
    std::vector<double> gap;
    for (int N : {64, 128}) {
      SolveOptions opts;
      if (N == 64) opts.boundary_tolerance = 1e-8;
      const DualSolveResult r = solve_1p1(cosine_boundary(N), eps, opts);
      suite.record_solve(r, "solver_vs_oracle eps " + sci(eps) + " N " + std::to_string(N));
      const StripField fd = fd_reference_solver(cosine_boundary(N), eps);
      gap.push_back((r.u.samples() - fd.samples()).cwiseAbs().maxCoeff());
      if (N == 128 && eps == 0.1) io::write_solution_bundle(suite.out / "solve_cos01_eps0.1", r);
    }
    const std::string key = "solver_vs_oracle_eps_" + sci(eps);
    suite.convergence[key]["grids"] = {64, 128};
    suite.convergence[key]["gap"] = gap;
    const double ratio = gap[0] / gap[1];
    o.require(gap[1] <= 5e-3 && ratio >= 3.5,
              "eps " + sci(eps) + " gap " + sci(gap[1]) + " ratio " + fix(ratio));
  }
  return o;
}

SweepReport sweep_report;

Outcome uniformity(Suite& suite) {
  Outcome o;
  const BoundaryData b = cosine_boundary(128);
  sweep_report = epsilon_sweep(b, "cosine01", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  io::write_sweep_report(suite.out / "sweep_cosine01", sweep_report);
  int failed = 0;
  double worst = 0;
  std::string worst_col;
  const SweepEntry& ref = sweep_report.entries.front();
  for (const auto& e : sweep_report.entries) {
    if (!e.ok) {
      ++failed;
      o.require(false, "eps " + sci(e.epsilon) + " failed: " + e.error);
      continue;
    }
    suite.margins_minus_lambda.push_back(e.margin - b.lambda);
    ++suite.dual_solves;
    if (!e.max_principle.ok()) suite.max_principle_failures.push_back("sweep eps " + sci(e.epsilon));
    for (const auto& n : e.norms.entries) {
      const double base = ref.ok ? ref.norms.at(n.a, n.b).norm : 0;
      if (base > kUniformityFloor && n.norm / base > worst) {
        worst = n.norm / base;
        worst_col = "(" + std::to_string(n.a) + "," + std::to_string(n.b) + ")";
      }
    }
  }
  o.require(failed == 0, std::to_string(failed) + " failed entries");
  o.require(sweep_report.uniform,
            "uniform; max column ratio " + fix(worst) + " at " + worst_col);
  return o;
}

Outcome margin_propagation(Suite& suite) {
  Outcome o;
  const PeriodicPotential zero = constant(64, 0.0);
  const DualSolveResult q =
      solve_1p1(BoundaryData::make(zero, constant(64, 0.125)), 0.25);
  suite.record_solve(q, "quadratic eps 0.25");
  io::write_solution_bundle(suite.out / "solve_quadratic_eps0.25", q);
  double worst = INFINITY;
  for (double d : suite.margins_minus_lambda) worst = std::min(worst, d);
  o.require(!suite.margins_minus_lambda.empty(),
            std::to_string(suite.margins_minus_lambda.size()) + " accepted solves");
  o.require(worst >= -1e-6, "min(margin - lambda) " + sci(worst));
  return o;
}

Outcome maximum_principle(Suite& suite) {
  Outcome o;
  double reduction = 0;
  for (const auto& e : sweep_report.entries) {
    if (e.ok) reduction = std::max(reduction, e.max_principle.reduction_error);
  }
  o.require(suite.dual_solves > 0, std::to_string(suite.dual_solves) + " dual solves");
  o.require(suite.max_principle_failures.empty(),
            std::to_string(suite.max_principle_failures.size()) + " with a failed flag");
  o.require(reduction <= 1e-10, "sweep reduction error " + sci(reduction));
  return o;
}

Outcome bordered_hessian(Suite&) {
  Outcome o;
  BorderedHessianErrors closed{0, 0};
  for (int dims : {1, 2}) {
    const BorderedHessianErrors e =
        dual_hessian_errors(make_strip_transform(quadratic_in_t(dims, 16, 8, 0.25)));
    closed.matrix = std::max(closed.matrix, e.matrix);
    closed.determinant = std::max(closed.determinant, e.determinant);
  }
  o.require(closed.matrix <= 1e-10 && closed.determinant <= 1e-10,
            "closed form " + sci(closed.matrix) + " / det " + sci(closed.determinant));
  struct Case {
    int dims, N, M;
  };
  for (const Case c : {Case{1, 128, 32}, Case{2, 32, 16}}) {
    const auto coarse = dual_hessian_errors(make_strip_transform(manufactured(c.dims, c.N, c.M)));
    const auto fine =
        dual_hessian_errors(make_strip_transform(manufactured(c.dims, c.N, 2 * c.M)));
    const double rm = coarse.matrix / fine.matrix;
    const double rd = coarse.determinant / fine.determinant;
    o.require(rm >= 3.5 && rd >= 3.5, "n=" + std::to_string(c.dims) + " ratios " + fix(rm) +
                                          " / det " + fix(rd));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  Suite suite;
  suite.out = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(suite.out);

  const std::vector<std::pair<std::string, std::function<Outcome(Suite&)>>> criteria{
      {"involution", involution},
      {"determinant reciprocity", reciprocity},
      {"duality of the FD-oracle solution", fd_oracle_duality},
      {"transform identities", transform_identities},
      {"linearized symbol ellipticity", symbol},
      {"closed-form dual solve", closed_form_dual},
      {"solver vs FD oracle", solver_vs_oracle},
      {"uniform estimates", uniformity},
      {"convexity margin propagation", margin_propagation},
      {"maximum principle", maximum_principle},
      {"bordered dual Hessian", bordered_hessian},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(suite);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  io::write_json(suite.out / "convergence.json", suite.convergence);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "pleg/estimates.hpp"

#include "pleg/errors.hpp"
#include "pleg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pleg {

namespace {

constexpr double kMaxPrincipleSlack = 1e-10;
constexpr double kReductionTolerance = 1e-10;
constexpr int kOversample = 8;
constexpr int kPolishPeaks = 4;

StripField t_derivative_or_copy(const StripField& u, int order) {
  return order == 0 ? u : t_derivative(u, order, 4);
}

// sup over y in [0, 1) of |g(y)|: oversampled grid, then golden-section
// polish around the largest few local maxima
template <typename Fn>
double continuous_sup(int nodes, Fn&& g) {
  const int count = kOversample * nodes;
  const double h = 1.0 / count;
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = std::abs(g(i * h));
  std::vector<int> peaks;
  for (int i = 0; i < count; ++i) {
    const double l = v[(i + count - 1) % count], r = v[(i + 1) % count];
    if (v[i] >= l && v[i] >= r) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return v[a] > v[b]; });
  if (peaks.size() > kPolishPeaks) peaks.resize(kPolishPeaks);

  double best = *std::max_element(v.begin(), v.end());
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int p : peaks) {
    double a = (p - 1) * h, b = (p + 1) * h;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double gc = std::abs(g(c)), gd = std::abs(g(d));
    for (int it = 0; it < 60; ++it) {
      if (gc > gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - phi * (b - a);
        gc = std::abs(g(c));
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + phi * (b - a);
        gd = std::abs(g(d));
      }
    }
    best = std::max({best, gc, gd});
  }
  return best;
}

Eigen::VectorXd node_coordinate(const TorusGrid& grid) {
  Eigen::VectorXd y(grid.num_nodes());
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) y(i) = grid.node(i)(0);
  return y;
}

}  // namespace

const NormEntry& NormTable::at(int a, int b) const {
  for (const auto& e : entries) {
    if (e.a == a && e.b == b) return e;
  }
  throw std::out_of_range("no norm entry (" + std::to_string(a) + ", " +
                          std::to_string(b) + ")");
}

NormTable derivative_norms(const StripField& u, int N_max,
                           std::optional<double> epsilon) {
  if (N_max < 0 || N_max > kMaxNormOrder) {
    throw std::invalid_argument("derivative_norms: N_max must lie in [0, 4], got " +
                                std::to_string(N_max));
  }
  if (u.grid().dims() != 1 && epsilon) {
    throw std::invalid_argument(
        "derivative_norms: the equation-based values need n = 1");
  }

  std::vector<StripField> dt;
  for (int b = 0; b <= N_max; ++b) dt.push_back(t_derivative_or_copy(u, b));

  // u_tt = (eps + u_xt^2) / (1 + u_xx) and its t-derivatives
  std::vector<StripField> eq;
  if (epsilon && N_max >= 2) {
    const StripField uxt = x_derivative(dt[1], {1, 0, 0});
    const StripField uxx = x_derivative(u, {2, 0, 0});
    StripField e = u;
    e.samples() = ((uxt.samples().array().square() + *epsilon) /
                   (uxx.samples().array() + 1))
                      .matrix();
    for (int b = 2; b <= N_max; ++b) eq.push_back(t_derivative_or_copy(e, b - 2));
  }

  NormTable table;
  for (int total = 0; total <= N_max; ++total) {
    for (int b = 0; b <= total; ++b) {
      const int a = total - b;
      NormEntry entry{a, b, sup_norm(x_derivative(dt[b], {a, 0, 0})), std::nullopt};
      if (b >= 2 && !eq.empty()) {
        entry.from_equation = sup_norm(x_derivative(eq[b - 2], {a, 0, 0}));
      }
      table.entries.push_back(entry);
    }
  }
  return table;
}

double convexity_margin(const StripField& u) {
  double margin = INFINITY;
  for (int j = 0; j < u.num_slices(); ++j) {
    margin = std::min(margin, hessian_margin(u.slice(j)));
  }
  return margin;
}

bool MaxPrincipleReport::ok() const {
  return reduction_ok && std::all_of(flags.begin(), flags.end(),
                                     [](const MaxPrincipleFlag& f) { return f.ok; });
}

MaxPrincipleReport max_principle_check(const DualLaplaceSolution& sol, int m_max,
                                       int slices) {
  if (m_max < 0 || slices < 2) {
    throw std::invalid_argument("max_principle_check: need m_max >= 0, slices >= 2");
  }
  const int N = sol.grid().size(0);
  MaxPrincipleReport report;
  report.flags.resize(static_cast<size_t>(m_max + 1) * 2);
  parallel_for(static_cast<long>(report.flags.size()), [&](long idx) {
    const int m = static_cast<int>(idx / 2), k = static_cast<int>(idx % 2);
    MaxPrincipleFlag flag{m, k, 0, 0, false};
    for (int j = 1; j < slices; ++j) {
      const double s = static_cast<double>(j) / slices;
      flag.interior = std::max(flag.interior,
                               sol.homogeneous(s, m, k).cwiseAbs().maxCoeff());
    }
    for (double s : {0.0, 1.0}) {
      flag.boundary = std::max(flag.boundary, continuous_sup(N, [&](double y) {
                                 return sol.homogeneous_at(y, s, m, k);
                               }));
    }
    flag.ok = flag.interior <= flag.boundary + kMaxPrincipleSlack;
    report.flags[idx] = flag;
  });

  for (int j = 0; j <= slices; ++j) {
    const double s = static_cast<double>(j) / slices;
    for (int m = 0; m <= m_max; ++m) {
      const Eigen::VectorXd lhs = sol.homogeneous(s, m, 2);
      const Eigen::VectorXd rhs = -sol.epsilon() * sol.homogeneous(s, m + 2, 0);
      const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
      report.reduction_error =
          std::max(report.reduction_error, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
  }
  report.reduction_ok = report.reduction_error <= kReductionTolerance;
  return report;
}

ChainResiduals chain_formula_check(const StripTransform& st, int m_max) {
  if (st.dims() != 1) {
    throw std::invalid_argument("chain_formula_check: needs n = 1");
  }
  if (m_max < 1 || m_max > 2) {
    throw std::invalid_argument("chain_formula_check: m_max must be 1 or 2, got " +
                                std::to_string(m_max));
  }
  const TorusGrid& grid = st.f.grid();
  StripField disp = st.x_of_ys[0];
  disp.samples().colwise() -= node_coordinate(grid);

  const Eigen::ArrayXXd g = st.metric[0].samples().array();
  const Eigen::ArrayXXd utx = st.u_tx[0].samples().array();

  ChainResiduals out;
  const StripField dy_x = x_derivative(disp, {1, 0, 0});
  out.dy_x = (dy_x.samples().array() + 1 - 1 / g).abs().maxCoeff();
  const StripField ds_x = t_derivative(st.x_of_ys[0], 1);
  out.ds_x = (ds_x.samples().array() + utx / g).abs().maxCoeff();
  if (m_max == 2) {
    const StripField uxxx =
        transport_to_dual(x_derivative(st.u, {3, 0, 0}), st.x_of_ys);
    const StripField uxxt = transport_to_dual(
        x_derivative(t_derivative(st.u, 1), {2, 0, 0}), st.x_of_ys);
    const Eigen::ArrayXXd u3 = uxxx.samples().array();
    const Eigen::ArrayXXd u2t = uxxt.samples().array();
    const Eigen::ArrayXXd g3 = g.cube();
    const StripField dyy_x = x_derivative(disp, {2, 0, 0});
    out.dyy_x = (dyy_x.samples().array() + u3 / g3).abs().maxCoeff();
    const StripField dys_x = x_derivative(ds_x, {1, 0, 0});
    out.dys_x =
        (dys_x.samples().array() + (u2t * g - utx * u3) / g3).abs().maxCoeff();
  }
  return out;
}

SweepReport epsilon_sweep(const BoundaryData& b, const std::string& boundary_id,
                          const std::vector<double>& epsilons,
                          const SweepOptions& options) {
  SweepReport report;
  report.boundary_id = boundary_id;
  report.epsilons = epsilons;
  report.lambda = b.lambda;
  report.factor = options.factor;
  report.entries.resize(epsilons.size());
  if (epsilons.empty()) return report;

  parallel_for(static_cast<long>(epsilons.size()), [&](long i) {
    SweepEntry& e = report.entries[i];
    e.epsilon = epsilons[i];
    try {
      const DualSolveResult r = solve_1p1(b, e.epsilon, options.solve);
      e.norms = derivative_norms(r.u, options.N_max, e.epsilon);
      e.margin = convexity_margin(r.u);
      e.residual_ma = r.residual_ma;
      e.max_principle =
          max_principle_check(*r.dual, options.max_principle_order, r.f.intervals());
      e.ok = true;
    } catch (const NumericalError& err) {
      e.error = std::string(err.kind()) + ": " + err.what();
    } catch (const std::exception& err) {
      e.error = std::string("ValidationError: ") + err.what();
    }
  });

  const bool all_ok = std::all_of(report.entries.begin(), report.entries.end(),
                                  [](const SweepEntry& e) { return e.ok; });
  if (!all_ok) return report;
  const auto ref = std::max_element(
      report.entries.begin(), report.entries.end(),
      [](const SweepEntry& x, const SweepEntry& y) { return x.epsilon < y.epsilon; });
  report.uniform = true;
  for (const auto& e : report.entries) {
    for (const auto& n : e.norms.entries) {
      const double bound = options.factor * ref->norms.at(n.a, n.b).norm + kUniformityFloor;
      if (!std::isfinite(n.norm) || n.norm > bound) report.uniform = false;
    }
  }
  return report;
}

}  // namespace pleg

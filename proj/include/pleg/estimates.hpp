#pragma once

// Measurements behind the epsilon-uniform estimates of the 1+1 problem:
// derivative sup-norms, convexity margins, maximum-principle bounds on the
// dual solution and the chain formulas linking x(y, s) to u.

#include "pleg/duality.hpp"
#include "pleg/solver_1p1.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pleg {

inline constexpr int kMaxNormOrder = 4;

struct NormEntry {
  int a = 0;  // x-order
  int b = 0;  // t-order
  double norm = 0;
  std::optional<double> from_equation;  // b >= 2, via u_tt = (eps + u_xt^2) / (1 + u_xx)
};

struct NormTable {
  std::vector<NormEntry> entries;  // a + b <= N_max, ordered by (a + b, b)
  /// Throws std::out_of_range for an absent (a, b).
  const NormEntry& at(int a, int b) const;
};

/// sup |d_x^a d_t^b u| for a + b <= N_max: spectral in x, fourth-order FD in
/// t. With eps given, entries with b >= 2 also carry the value obtained by
/// differentiating the equation-based u_tt. Throws std::invalid_argument
/// for N_max outside [0, 4].
NormTable derivative_norms(const StripField& u, int N_max,
                           std::optional<double> epsilon = std::nullopt);

/// Minimum over slices and nodes of the smallest eigenvalue of D^2_x u + I.
double convexity_margin(const StripField& u);

struct MaxPrincipleFlag {
  int m = 0;
  int k = 0;
  double interior = 0;  // sup over interior slices and nodes
  double boundary = 0;  // sup over s in {0, 1}, y continuous
  bool ok = false;      // interior <= boundary + 1e-10
};

struct MaxPrincipleReport {
  std::vector<MaxPrincipleFlag> flags;  // m <= m_max, k in {0, 1}
  double reduction_error = 0;  // max relative gap of d_y^m d_s^2 = -eps d_y^{m+2}
  bool reduction_ok = false;   // reduction_error <= 1e-10
  bool ok() const;
};

/// Checks the homogeneous dual solution against its boundary sup for every
/// d_y^m d_s^k, m <= m_max, k <= 1, on `slices` + 1 levels. Boundary sups
/// are located by oversampling and polished by golden-section search.
MaxPrincipleReport max_principle_check(const DualLaplaceSolution& sol,
                                       int m_max = 4, int slices = 64);

/// Residuals of the one-dimensional chain formulas on a strip transform:
///   d_y x = 1 / (1 + u_xx),   d_s x = -u_xt / (1 + u_xx),
/// and for m_max = 2
///   d_y^2 x = -u_xxx / (1 + u_xx)^3,
///   d_y d_s x = -(u_xxt (1 + u_xx) - u_xt u_xxx) / (1 + u_xx)^3,
/// with u-side data at the mapped points. Throws std::invalid_argument
/// unless n = 1 and 1 <= m_max <= 2.
struct ChainResiduals {
  double dy_x = 0;
  double ds_x = 0;
  std::optional<double> dyy_x;
  std::optional<double> dys_x;
};
ChainResiduals chain_formula_check(const StripTransform& st, int m_max = 1);

struct SweepEntry {
  double epsilon = 0;
  bool ok = false;
  std::string error;  // kind and message when !ok
  NormTable norms;
  double margin = 0;
  double residual_ma = 0;
  MaxPrincipleReport max_principle;
};

struct SweepReport {
  std::string boundary_id;
  std::vector<double> epsilons;
  double lambda = 0;
  double factor = 2;
  std::vector<SweepEntry> entries;  // same order as epsilons
  bool uniform = false;
};

inline constexpr double kUniformityFloor = 1e-9;

struct SweepOptions {
  int N_max = 3;
  double factor = 2;
  SolveOptions solve;
  int max_principle_order = 4;
};

/// Runs solve_1p1 per eps, collecting norms, margins and maximum-principle
/// flags. Failures are recorded per entry and never abort the sweep. The
/// report is uniform when every entry succeeded and each norm column stays
/// within factor x its value at the largest eps (plus kUniformityFloor).
SweepReport epsilon_sweep(const BoundaryData& b, const std::string& boundary_id,
                          const std::vector<double>& epsilons,
                          const SweepOptions& options = {});

}  // namespace pleg

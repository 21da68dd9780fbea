#pragma once

// Command-line driver: transform, verify, solve and sweep.

#include "pleg/solver_1p1.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pleg::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kConvergence = 2,
  kInvariant = 3,
};

struct RunConfig {
  std::string command;
  std::string boundary = "cosine01";
  std::string boundary1;  // empty: same as boundary
  double epsilon = 0.1;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4};
  int nx = 128;
  int nt = 0;  // 0: nx
  int dims = 1;  // verify only
  std::string out = "out";

  double residual_bound = SolveOptions{}.residual_bound;
  double boundary_tolerance = SolveOptions{}.boundary_tolerance;
  double margin_tolerance = SolveOptions{}.margin_tolerance;
  int n_max = 3;
  double factor = 2;

  int slices() const { return nt > 0 ? nt : nx; }
};

/// Throws std::invalid_argument on an unknown command, odd or small grid
/// sizes, eps outside (0, 1] or an empty output path.
void validate(const RunConfig& config);

/// `const:<c>`, `cos:<a>`, `quadratic`, `cosine01` or a torus-field CSV
/// path. `quadratic` reads as u0 = 0 for the first boundary and eps / 2
/// for the second, so that the solution is eps t^2 / 2.
PeriodicPotential parse_potential(const std::string& spec, int nx, double epsilon,
                                  bool second);
/// Throws std::invalid_argument for specs violating 1 + u_xx > 0.
BoundaryData parse_boundary(const RunConfig& config);

/// Reads --config first, then lets flags override. Returns std::nullopt
/// after printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv);

/// Runs the command, writing artifacts under config.out and a one-line JSON
/// summary to `out`. Failures print one JSON line to `err` and map to the
/// exit codes above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with the same error mapping.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pleg::cli

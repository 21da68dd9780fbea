#pragma once

// File formats. Every writer goes through write_atomic; every format has a
// reader that accepts exactly what the writer emits.
//
//   torus field   "# torus_field v1, n=<n>, N=<N_1,...>", then one row
//                 "coords..., value" per node, row-major, %.17g
//   strip field   "# strip_field v1, n=<n>, N=<...>, M=<M>", then per slice
//                 "# slice <j>, t=<t>" followed by a torus field block
//   bundles       directories of the above plus manifest.json

#include "pleg/estimates.hpp"
#include "pleg/legendre.hpp"
#include "pleg/solver_1p1.hpp"
#include "pleg/strip_field.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pleg::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Writes to "<path>.tmp" and renames over path. Creates parent directories.
void write_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

void write_json(const fs::path& path, const Json& value);
Json read_json(const fs::path& path);

std::string format_torus_field(const PeriodicField<double>& field);
PeriodicField<double> parse_torus_field(const std::string& text);
void write_torus_field(const fs::path& path, const PeriodicField<double>& field);
PeriodicField<double> read_torus_field(const fs::path& path);

std::string format_strip_field(const StripField& field);
StripField parse_strip_field(const std::string& text);
void write_strip_field(const fs::path& path, const StripField& field);
StripField read_strip_field(const fs::path& path);

/// u.csv, f.csv, manifest.json {n, N, margin_u, margin_f}.
void write_transform_bundle(const fs::path& dir, const TransformPair& pair);
struct TransformBundle {
  PeriodicField<double> u;
  PeriodicField<double> f;
  Json manifest;
};
TransformBundle read_transform_bundle(const fs::path& dir);

/// u.csv, f.csv, manifest.json {epsilon, N, M, lambda, residual_ma, margin_min}.
void write_solution_bundle(const fs::path& dir, const DualSolveResult& result);
struct SolutionBundle {
  StripField u;
  StripField f;
  Json manifest;
};
SolutionBundle read_solution_bundle(const fs::path& dir);

/// norms.csv, margins.csv, max_principle.csv, summary.json.
void write_sweep_report(const fs::path& dir, const SweepReport& report);

struct NormRow {
  double epsilon = 0;
  int a = 0;
  int b = 0;
  double norm = 0;
  std::optional<double> norm_equation;
};
struct MarginRow {
  double epsilon = 0;
  double margin = 0;
};
struct MaxPrincipleRow {
  double epsilon = 0;
  MaxPrincipleFlag flag;
};
struct SweepFiles {
  std::vector<NormRow> norms;
  std::vector<MarginRow> margins;
  std::vector<MaxPrincipleRow> max_principle;
  Json summary;
};
SweepFiles read_sweep_report(const fs::path& dir);

}  // namespace pleg::io

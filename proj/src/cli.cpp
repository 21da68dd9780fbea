#include "pleg/cli.hpp"

#include "pleg/duality.hpp"
#include "pleg/errors.hpp"
#include "pleg/estimates.hpp"
#include "pleg/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

namespace pleg::cli {

namespace {

using io::Json;

const std::vector<std::string> kCommands{"transform", "verify", "solve", "sweep"};

double parse_number(const std::string& text, const std::string& what) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument(what + ": not a number: '" + text + "'");
  }
  return v;
}

// eps t^2 / 2 + alpha t sum_d sin(2 pi x_d), alpha small enough that every
// slice keeps a wide margin
StripField manufactured_strip(int dims, int N, int M) {
  const double alpha = dims == 1 ? 0.01 : 0.005;
  return StripField::from_function(
      TorusGrid::cube(dims, N), M, [=](const Point& x, double t) {
        double s = 0;
        for (int d = 0; d < dims; ++d) s += std::sin(2 * std::numbers::pi * x(d));
        return t * t / 2 + alpha * t * s;
      });
}

StripField verify_strip(const RunConfig& c, int M) {
  if (c.boundary == "quadratic") {
    const double eps = c.epsilon;
    return StripField::from_function(TorusGrid::cube(c.dims, c.nx), M,
                                     [eps](const Point&, double t) { return eps * t * t / 2; });
  }
  if (c.boundary == "manufactured") return manufactured_strip(c.dims, c.nx, M);
  return io::read_strip_field(c.boundary);
}

// every other slice of a strip with an even number of intervals
std::optional<StripField> coarsen(const StripField& u) {
  if (u.intervals() % 2 != 0 || u.intervals() < 4) return std::nullopt;
  const int M = u.intervals() / 2;
  Eigen::MatrixXd s(u.samples().rows(), M + 1);
  for (int j = 0; j <= M; ++j) s.col(j) = u.samples().col(2 * j);
  return StripField(u.grid(), std::move(s));
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.intervals = c.slices();
  o.residual_bound = c.residual_bound;
  o.boundary_tolerance = c.boundary_tolerance;
  o.margin_tolerance = c.margin_tolerance;
  return o;
}

Json run_transform(const RunConfig& c) {
  const PeriodicPotential u = parse_potential(c.boundary, c.nx, c.epsilon, false);
  if (!u.is_convex()) {
    throw std::invalid_argument("boundary '" + c.boundary + "' is not convex (margin " +
                                detail::sci(u.margin()) + ")");
  }
  const TransformPair pair = partial_transform(u);
  io::write_transform_bundle(c.out, pair);
  Json s;
  s["command"] = "transform";
  s["margin_u"] = pair.u.margin();
  s["margin_f"] = pair.f.margin();
  s["reciprocity"] = reciprocity_error(pair);
  return s;
}

Json run_verify(const RunConfig& c) {
  const StripField u = verify_strip(c, c.slices());
  const auto fine = identity_residuals(make_strip_transform(u));
  std::vector<IdentityResidual> coarse;
  if (const auto half = coarsen(u)) coarse = identity_residuals(make_strip_transform(*half));

  Json report;
  double worst = 0;
  for (size_t i = 0; i < fine.size(); ++i) {
    Json e;
    e["sup_norm"] = fine[i].sup_norm;
    e["grid"] = u.grid().sizes();
    e["slices"] = u.num_slices();
    if (i < coarse.size() && coarse[i].name == fine[i].name && fine[i].sup_norm > 0) {
      e["refinement_ratio"] = coarse[i].sup_norm / fine[i].sup_norm;
    } else {
      e["refinement_ratio"] = nullptr;
    }
    report[fine[i].name] = e;
    worst = std::max(worst, fine[i].sup_norm);
  }
  io::write_json(std::filesystem::path(c.out) / "verify.json", report);
  Json s;
  s["command"] = "verify";
  s["identities"] = fine.size();
  s["max_sup_norm"] = worst;
  return s;
}

Json run_solve(const RunConfig& c) {
  const BoundaryData b = parse_boundary(c);
  const DualSolveResult r = solve_1p1(b, c.epsilon, solve_options(c));
  io::write_solution_bundle(c.out, r);
  Json s;
  s["command"] = "solve";
  s["epsilon"] = r.epsilon;
  s["lambda"] = r.lambda;
  s["residual_ma"] = r.residual_ma;
  s["margin_min"] = r.margin_min;
  return s;
}

Json run_sweep(const RunConfig& c) {
  const BoundaryData b = parse_boundary(c);
  SweepOptions o;
  o.N_max = c.n_max;
  o.factor = c.factor;
  o.solve = solve_options(c);
  const std::string id =
      c.boundary1.empty() || c.boundary1 == c.boundary ? c.boundary
                                                       : c.boundary + "|" + c.boundary1;
  const SweepReport r = epsilon_sweep(b, id, c.epsilons, o);
  io::write_sweep_report(c.out, r);
  int failed = 0;
  for (const auto& e : r.entries) failed += e.ok ? 0 : 1;
  Json s;
  s["command"] = "sweep";
  s["uniform"] = r.uniform;
  s["entries"] = r.entries.size();
  s["failed"] = failed;
  return s;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message,
                 int code) {
  Json e;
  e["error"] = kind;
  e["message"] = message;
  e["exit_code"] = code;
  err << e.dump() << std::endl;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InvariantViolation& e) {
    print_error(err, e.kind(), e.what(), kInvariant);
    return kInvariant;
  } catch (const SliceNotConvex& e) {
    print_error(err, e.kind(), e.what(), kInvariant);
    return kInvariant;
  } catch (const NumericalError& e) {
    print_error(err, e.kind(), e.what(), kConvergence);
    return kConvergence;
  } catch (const CLI::ParseError& e) {
    print_error(err, "ValidationError", e.what(), kValidation);
    return kValidation;
  } catch (const Json::exception& e) {
    print_error(err, "ValidationError", e.what(), kValidation);
    return kValidation;
  } catch (const std::exception& e) {
    print_error(err, "ValidationError", e.what(), kValidation);
    return kValidation;
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw std::invalid_argument("command must be one of transform, verify, solve, sweep; got '" +
                                c.command + "'");
  }
  for (int n : {c.nx, c.slices()}) {
    if (n < 8 || n % 2 != 0) {
      throw std::invalid_argument("grid sizes must be even and >= 8, got " +
                                  std::to_string(n));
    }
  }
  auto check_eps = [](double e) {
    if (!(e > 0 && e <= 1)) {
      throw std::invalid_argument("epsilon must lie in (0, 1], got " + detail::sci(e));
    }
  };
  if (c.command == "sweep") {
    for (double e : c.epsilons) check_eps(e);
  } else {
    check_eps(c.epsilon);
  }
  if (c.dims < 1 || c.dims > 2) throw std::invalid_argument("dims must be 1 or 2");
  if (c.dims != 1 && c.command != "verify") {
    throw std::invalid_argument("only verify supports dims = 2");
  }
  if (c.n_max < 0 || c.n_max > kMaxNormOrder) {
    throw std::invalid_argument("n_max must lie in [0, 4]");
  }
  if (c.out.empty()) throw std::invalid_argument("output directory must be given");
}

PeriodicPotential parse_potential(const std::string& spec, int nx, double epsilon,
                                  bool second) {
  const TorusGrid grid({nx});
  auto constant = [&](double c) {
    return PeriodicPotential(PeriodicField<double>::constant(grid, c));
  };
  auto cosine = [&](double a) {
    if (!(2 * std::numbers::pi * std::abs(a) < 1)) {
      throw std::invalid_argument(spec +
                                  " violates 1 + u_xx > 0 (needs 2 pi |a| < 1)");
    }
    return PeriodicPotential::from_function(grid, [a](const Point& x) {
      return -(a / (2 * std::numbers::pi)) * std::cos(2 * std::numbers::pi * x(0));
    });
  };
  if (spec == "quadratic") return constant(second ? epsilon / 2 : 0.0);
  if (spec == "cosine01") return cosine(0.1);
  if (spec.rfind("const:", 0) == 0) return constant(parse_number(spec.substr(6), spec));
  if (spec.rfind("cos:", 0) == 0) return cosine(parse_number(spec.substr(4), spec));
  const PeriodicField<double> f = io::read_torus_field(spec);
  if (f.grid().dims() != 1) {
    throw std::invalid_argument(spec + ": boundary fields must be one-dimensional");
  }
  return PeriodicPotential(f);
}

BoundaryData parse_boundary(const RunConfig& c) {
  const std::string second = c.boundary1.empty() ? c.boundary : c.boundary1;
  PeriodicPotential u0 = parse_potential(c.boundary, c.nx, c.epsilon, false);
  PeriodicPotential u1 = parse_potential(second, c.nx, c.epsilon, true);
  if (!(u0.grid() == u1.grid())) {
    throw std::invalid_argument("boundary potentials live on different grids");
  }
  if (!u0.is_convex() || !u1.is_convex()) {
    throw std::invalid_argument("boundary violates 1 + u_xx > 0 (margin " +
                                detail::sci(std::min(u0.margin(), u1.margin())) + ")");
  }
  return BoundaryData::make(std::move(u0), std::move(u1));
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv) {
  CLI::App app{"Partial Legendre transform toolkit for degenerate Monge-Ampere problems"};
  std::string config_path, command, boundary, boundary1, out, epsilons;
  double epsilon = 0;
  int nx = 0, nt = 0, dims = 0;
  app.add_option("--config", config_path, "JSON config file; flags override it");
  app.add_option("--command", command, "transform | verify | solve | sweep");
  app.add_option("--boundary", boundary,
                 "const:<c>, cos:<a>, quadratic, cosine01 or a torus-field CSV "
                 "(verify: quadratic, manufactured or a strip CSV)");
  app.add_option("--boundary1", boundary1, "boundary at t = 1 (default: --boundary)");
  app.add_option("--epsilon", epsilon, "epsilon for transform/verify/solve");
  app.add_option("--epsilons", epsilons, "comma-separated epsilons for sweep");
  app.add_option("--nx", nx, "x-grid size");
  app.add_option("--nt", nt, "number of t-intervals (default: nx)");
  app.add_option("--dims", dims, "torus dimension for verify");
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return std::nullopt;
  }

  RunConfig c;
  if (!config_path.empty()) {
    const Json j = io::read_json(config_path);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "command") c.command = value.get<std::string>();
      else if (key == "boundary") c.boundary = value.get<std::string>();
      else if (key == "boundary1") c.boundary1 = value.get<std::string>();
      else if (key == "epsilon") c.epsilon = value.get<double>();
      else if (key == "epsilons") c.epsilons = value.get<std::vector<double>>();
      else if (key == "nx") c.nx = value.get<int>();
      else if (key == "nt") c.nt = value.get<int>();
      else if (key == "dims") c.dims = value.get<int>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "residual_bound") c.residual_bound = value.get<double>();
      else if (key == "boundary_tolerance") c.boundary_tolerance = value.get<double>();
      else if (key == "margin_tolerance") c.margin_tolerance = value.get<double>();
      else if (key == "n_max") c.n_max = value.get<int>();
      else if (key == "factor") c.factor = value.get<double>();
      else throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (app.count("--command")) c.command = command;
  if (app.count("--boundary")) c.boundary = boundary;
  if (app.count("--boundary1")) c.boundary1 = boundary1;
  if (app.count("--epsilon")) c.epsilon = epsilon;
  if (app.count("--nx")) c.nx = nx;
  if (app.count("--nt")) c.nt = nt;
  if (app.count("--dims")) c.dims = dims;
  if (app.count("--out")) c.out = out;
  if (app.count("--epsilons")) {
    c.epsilons.clear();
    std::stringstream ss(epsilons);
    std::string item;
    while (std::getline(ss, item, ',')) c.epsilons.push_back(parse_number(item, "--epsilons"));
  }
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(config);
    Json summary;
    if (config.command == "transform") summary = run_transform(config);
    else if (config.command == "verify") summary = run_verify(config);
    else if (config.command == "solve") summary = run_solve(config);
    else summary = run_sweep(config);
    out << summary.dump() << std::endl;
    return static_cast<int>(kOk);
  });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  const int code = guarded(err, [&] {
    config = parse_args(argc, argv);
    return static_cast<int>(kOk);
  });
  if (code != kOk || !config) return code;
  return run(*config, out, err);
}

}  // namespace pleg::cli

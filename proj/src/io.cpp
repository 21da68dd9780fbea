#include "pleg/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pleg::io {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("not a number: '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("not an integer: '" + s + "'");
  }
  return v;
}

std::string join_sizes(const TorusGrid& grid) {
  std::string s;
  for (int d = 0; d < grid.dims(); ++d) {
    if (d) s += ',';
    s += std::to_string(grid.size(d));
  }
  return s;
}

std::string torus_header(const TorusGrid& grid) {
  return "# torus_field v1, n=" + std::to_string(grid.dims()) + ", N=" + join_sizes(grid);
}

// key=value pairs of a "# <tag> v1, k=v, ..." line; N may hold commas
struct Header {
  std::string tag;
  int n = 0;
  std::vector<int> sizes;
  int M = -1;
};

Header parse_header(const std::string& line, const std::string& tag) {
  const std::string prefix = "# " + tag + " v1, ";
  if (line.rfind(prefix, 0) != 0) {
    throw FormatError("expected header '" + prefix + "...', got '" + line + "'");
  }
  Header h;
  h.tag = tag;
  const std::string rest = line.substr(prefix.size());
  const auto n_pos = rest.find("n=");
  const auto N_pos = rest.find("N=");
  if (n_pos != 0 || N_pos == std::string::npos) {
    throw FormatError("malformed header '" + line + "'");
  }
  h.n = to_int(split(rest.substr(2, N_pos - 2))[0]);
  std::string sizes = rest.substr(N_pos + 2);
  const auto M_pos = sizes.find("M=");
  if (M_pos != std::string::npos) {
    h.M = to_int(sizes.substr(M_pos + 2));
    sizes = sizes.substr(0, M_pos);
  }
  for (const auto& c : split(sizes)) {
    if (!c.empty()) h.sizes.push_back(to_int(c));
  }
  if (static_cast<int>(h.sizes.size()) != h.n) {
    throw FormatError("header dimension and size list disagree: '" + line + "'");
  }
  return h;
}

TorusGrid grid_from(const Header& h) {
  try {
    return TorusGrid(h.sizes);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

void append_torus_rows(std::string& out, const PeriodicField<double>& field) {
  const TorusGrid& grid = field.grid();
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i) {
    const Point x = grid.node(i);
    for (int d = 0; d < grid.dims(); ++d) out += g17(x(d)) + ",";
    out += g17(field[i]) + "\n";
  }
}

// Reads num_nodes rows starting at lines[pos], checking the coordinates.
Eigen::VectorXd read_torus_rows(const std::vector<std::string>& lines, size_t& pos,
                                const TorusGrid& grid) {
  Eigen::VectorXd v(grid.num_nodes());
  for (Eigen::Index i = 0; i < grid.num_nodes(); ++i, ++pos) {
    if (pos >= lines.size()) throw FormatError("torus field: missing rows");
    const auto cells = split(lines[pos]);
    if (static_cast<int>(cells.size()) != grid.dims() + 1) {
      throw FormatError("torus field: expected " + std::to_string(grid.dims() + 1) +
                        " columns in '" + lines[pos] + "'");
    }
    const Point x = grid.node(i);
    for (int d = 0; d < grid.dims(); ++d) {
      if (std::abs(to_double(cells[d]) - x(d)) > 1e-12) {
        throw FormatError("torus field: row " + std::to_string(i) +
                          " is not at the expected node");
      }
    }
    v(i) = to_double(cells.back());
  }
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::vector<std::string>> read_table(const fs::path& path,
                                                 const std::string& header) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty() || lines[0] != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  const size_t cols = split(header).size();
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i]);
    if (cells.size() != cols) {
      throw FormatError(path.string() + ": bad row '" + lines[i] + "'");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const Json& value) {
  write_atomic(path, value.dump(2) + "\n");
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_torus_field(const PeriodicField<double>& field) {
  std::string out = torus_header(field.grid()) + "\n";
  append_torus_rows(out, field);
  return out;
}

PeriodicField<double> parse_torus_field(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("torus field: empty input");
  const TorusGrid grid = grid_from(parse_header(lines[0], "torus_field"));
  size_t pos = 1;
  Eigen::VectorXd v = read_torus_rows(lines, pos, grid);
  if (pos != lines.size()) throw FormatError("torus field: trailing rows");
  return PeriodicField<double>(grid, std::move(v));
}

void write_torus_field(const fs::path& path, const PeriodicField<double>& field) {
  write_atomic(path, format_torus_field(field));
}

PeriodicField<double> read_torus_field(const fs::path& path) {
  return parse_torus_field(read_text(path));
}

std::string format_strip_field(const StripField& field) {
  const TorusGrid& grid = field.grid();
  std::string out = "# strip_field v1, n=" + std::to_string(grid.dims()) +
                    ", N=" + join_sizes(grid) +
                    ", M=" + std::to_string(field.intervals()) + "\n";
  for (int j = 0; j < field.num_slices(); ++j) {
    out += "# slice " + std::to_string(j) + ", t=" + g17(field.level(j)) + "\n";
    out += torus_header(grid) + "\n";
    append_torus_rows(out, field.slice(j));
  }
  return out;
}

StripField parse_strip_field(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("strip field: empty input");
  const Header h = parse_header(lines[0], "strip_field");
  if (h.M < 2) throw FormatError("strip field: need M >= 2");
  const TorusGrid grid = grid_from(h);
  Eigen::MatrixXd samples(grid.num_nodes(), h.M + 1);
  size_t pos = 1;
  for (int j = 0; j <= h.M; ++j) {
    const std::string tag = "# slice " + std::to_string(j) + ",";
    if (pos >= lines.size() || lines[pos].rfind(tag, 0) != 0) {
      throw FormatError("strip field: expected '" + tag + " t=...'");
    }
    ++pos;
    if (pos >= lines.size()) throw FormatError("strip field: truncated slice block");
    const Header block = parse_header(lines[pos++], "torus_field");
    if (block.sizes != h.sizes) throw FormatError("strip field: slice grid mismatch");
    samples.col(j) = read_torus_rows(lines, pos, grid);
  }
  if (pos != lines.size()) throw FormatError("strip field: trailing rows");
  return StripField(grid, std::move(samples));
}

void write_strip_field(const fs::path& path, const StripField& field) {
  write_atomic(path, format_strip_field(field));
}

StripField read_strip_field(const fs::path& path) {
  return parse_strip_field(read_text(path));
}

void write_transform_bundle(const fs::path& dir, const TransformPair& pair) {
  write_torus_field(dir / "u.csv", pair.u.samples());
  write_torus_field(dir / "f.csv", pair.f.samples());
  Json m;
  m["n"] = pair.u.grid().dims();
  m["N"] = pair.u.grid().sizes();
  m["margin_u"] = pair.u.margin();
  m["margin_f"] = pair.f.margin();
  write_json(dir / "manifest.json", m);
}

TransformBundle read_transform_bundle(const fs::path& dir) {
  return {read_torus_field(dir / "u.csv"), read_torus_field(dir / "f.csv"),
          read_json(dir / "manifest.json")};
}

void write_solution_bundle(const fs::path& dir, const DualSolveResult& result) {
  write_strip_field(dir / "u.csv", result.u);
  write_strip_field(dir / "f.csv", result.f);
  Json m;
  m["epsilon"] = result.epsilon;
  m["N"] = result.u.grid().size(0);
  m["M"] = result.u.intervals();
  m["lambda"] = result.lambda;
  m["residual_ma"] = result.residual_ma;
  m["margin_min"] = result.margin_min;
  write_json(dir / "manifest.json", m);
}

SolutionBundle read_solution_bundle(const fs::path& dir) {
  return {read_strip_field(dir / "u.csv"), read_strip_field(dir / "f.csv"),
          read_json(dir / "manifest.json")};
}

void write_sweep_report(const fs::path& dir, const SweepReport& report) {
  std::string norms = "epsilon,a,b,norm,norm_equation\n";
  std::string margins = "epsilon,margin\n";
  std::string flags = "epsilon,m,k,interior,boundary,ok\n";
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json j;
    j["epsilon"] = e.epsilon;
    j["ok"] = e.ok;
    if (!e.ok) {
      j["error"] = e.error;
      entries.push_back(j);
      continue;
    }
    j["residual_ma"] = e.residual_ma;
    j["margin"] = e.margin;
    j["max_principle"] = e.max_principle.ok();
    j["reduction_error"] = e.max_principle.reduction_error;
    entries.push_back(j);
    for (const auto& n : e.norms.entries) {
      norms += g17(e.epsilon) + "," + std::to_string(n.a) + "," + std::to_string(n.b) +
               "," + g17(n.norm) + "," +
               (n.from_equation ? g17(*n.from_equation) : std::string()) + "\n";
    }
    margins += g17(e.epsilon) + "," + g17(e.margin) + "\n";
    for (const auto& f : e.max_principle.flags) {
      flags += g17(e.epsilon) + "," + std::to_string(f.m) + "," + std::to_string(f.k) +
               "," + g17(f.interior) + "," + g17(f.boundary) + "," +
               (f.ok ? "1" : "0") + "\n";
    }
  }
  write_atomic(dir / "norms.csv", norms);
  write_atomic(dir / "margins.csv", margins);
  write_atomic(dir / "max_principle.csv", flags);

  Json s;
  s["boundary_id"] = report.boundary_id;
  s["uniform"] = report.uniform;
  s["factor"] = report.factor;
  s["lambda"] = report.lambda;
  s["epsilons"] = report.epsilons;
  s["entries"] = entries;
  write_json(dir / "summary.json", s);
}

SweepFiles read_sweep_report(const fs::path& dir) {
  SweepFiles out;
  for (const auto& r : read_table(dir / "norms.csv", "epsilon,a,b,norm,norm_equation")) {
    NormRow row{to_double(r[0]), to_int(r[1]), to_int(r[2]), to_double(r[3]), std::nullopt};
    if (!r[4].empty()) row.norm_equation = to_double(r[4]);
    out.norms.push_back(row);
  }
  for (const auto& r : read_table(dir / "margins.csv", "epsilon,margin")) {
    out.margins.push_back({to_double(r[0]), to_double(r[1])});
  }
  for (const auto& r :
       read_table(dir / "max_principle.csv", "epsilon,m,k,interior,boundary,ok")) {
    MaxPrincipleFlag f{to_int(r[1]), to_int(r[2]), to_double(r[3]), to_double(r[4]),
                       to_int(r[5]) != 0};
    out.max_principle.push_back({to_double(r[0]), f});
  }
  out.summary = read_json(dir / "summary.json");
  return out;
}

}  // namespace pleg::io

#include "ifsm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ifsm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::SchemaError, (path.empty() ? "/" : path) + ": " + message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(path, "expected a finite number");
  return d;
}

std::vector<double> numbers(const json& v, const std::string& path, std::size_t expected = 0) {
  if (!v.is_array()) schema_error(path, "expected an array of numbers");
  if (expected != 0 && v.size() != expected) {
    schema_error(path, "expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "/" + std::to_string(k)));
  return out;
}

Expression expression(const json& v, const std::string& path) {
  if (v.is_number()) return Expression::constant(number(v, path));
  if (!v.is_string()) schema_error(path, "expected an expression string");
  try {
    return Expression::parse(v.get<std::string>());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
}

DomainBox parse_domain(const json& v) {
  if (!v.is_object()) schema_error("/domain", "expected an object");
  const auto lower = numbers(require(v, "lower", "/domain"), "/domain/lower");
  const auto upper = numbers(require(v, "upper", "/domain"), "/domain/upper");
  try {
    return DomainBox::make(lower, upper);
  } catch (const Error& e) {
    schema_error("/domain", e.what());
  }
}

BranchMap parse_map(const json& v, const std::string& path, int dim, std::string& label) {
  if (!v.is_object()) schema_error(path, "expected an object");
  const json& l = require(v, "label", path);
  if (!l.is_string() || l.get<std::string>().empty()) schema_error(path + "/label", "expected a nonempty string");
  label = l.get<std::string>();
  const bool affine = v.contains("matrix") || v.contains("offset");
  if (affine == v.contains("exprs")) schema_error(path, "give either matrix and offset, or exprs");
  if (affine) {
    AffineMap m;
    m.matrix = {0.0, 0.0, 0.0, 0.0};
    const json& rows = require(v, "matrix", path);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(dim)) {
      schema_error(path + "/matrix", "expected " + std::to_string(dim) + " rows");
    }
    for (int r = 0; r < dim; ++r) {
      const auto row = numbers(rows[r], path + "/matrix/" + std::to_string(r), static_cast<std::size_t>(dim));
      for (int c = 0; c < dim; ++c) m.matrix[r * 2 + c] = row[c];
    }
    const auto off = numbers(require(v, "offset", path), path + "/offset", static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) m.offset[a] = off[a];
    return m;
  }
  const json& ex = v["exprs"];
  if (!ex.is_array() || ex.size() != static_cast<std::size_t>(dim)) {
    schema_error(path + "/exprs", "expected " + std::to_string(dim) + " expressions");
  }
  ExpressionMap m;
  for (int a = 0; a < dim; ++a) m.coords.push_back(expression(ex[a], path + "/exprs/" + std::to_string(a)));
  return m;
}

GridSettings parse_grid(const json& v, int dim) {
  GridSettings g;
  if (!v.is_object()) schema_error("/grid", "expected an object");
  for (const auto& [key, _] : v.items()) {
    if (key != "nodes" && key != "interp") schema_error("/grid/" + key, "unknown key");
  }
  if (auto it = v.find("nodes"); it != v.end()) {
    if (it->is_number_integer()) {
      g.nodes = {it->get<int>(), it->get<int>()};
    } else {
      const auto n = numbers(*it, "/grid/nodes", static_cast<std::size_t>(dim));
      for (int a = 0; a < dim; ++a) {
        if (n[a] != std::floor(n[a])) schema_error("/grid/nodes/" + std::to_string(a), "expected an integer");
        g.nodes[a] = static_cast<int>(n[a]);
      }
      if (dim == 1) g.nodes[1] = g.nodes[0];
    }
    for (int a = 0; a < dim; ++a) {
      if (g.nodes[a] < 2) schema_error("/grid/nodes", "at least two nodes per axis");
    }
  }
  if (auto it = v.find("interp"); it != v.end()) {
    if (!it->is_string()) schema_error("/grid/interp", "expected \"nearest\" or \"multilinear\"");
    try {
      g.interpolation = parse_interpolation(it->get<std::string>());
    } catch (const Error& e) {
      schema_error("/grid/interp", e.what());
    }
  }
  return g;
}

}  // namespace

Config parse_config(std::string_view text, bool raise_on_invalid) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("/: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("", "expected an object");
  static const std::set<std::string> known{"version", "name", "description", "domain",
                                           "maps",    "apriori", "weighting", "grid"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) schema_error("/" + key, "unknown key");
  }
  if (auto it = doc.find("version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != kConfigVersion) {
      schema_error("/version", "unsupported version (expected " + std::to_string(kConfigVersion) + ")");
    }
  }
  std::string name;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) schema_error("/name", "expected a string");
    name = it->get<std::string>();
  }

  const DomainBox box = parse_domain(require(doc, "domain", ""));
  const json& maps_json = require(doc, "maps", "");
  if (!maps_json.is_array() || maps_json.empty()) schema_error("/maps", "expected a nonempty array");
  std::vector<BranchMap> maps;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < maps_json.size(); ++k) {
    std::string label;
    maps.push_back(parse_map(maps_json[k], "/maps/" + std::to_string(k), box.dimension, label));
    labels.push_back(std::move(label));
  }
  const std::size_t n = maps.size();

  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  if (auto it = doc.find("apriori"); it != doc.end()) {
    weights = numbers(*it, "/apriori", n);
    for (std::size_t k = 0; k < n; ++k) {
      if (weights[k] < 0.0) schema_error("/apriori/" + std::to_string(k), "negative weight");
    }
  }
  std::optional<ParameterSet> params;
  try {
    params.emplace(labels, weights);
  } catch (const Error& e) {
    schema_error(doc.contains("apriori") ? "/apriori" : "/maps", e.what());
  }

  Weighting weighting = Potential::constant(1.0);
  if (auto it = doc.find("weighting"); it != doc.end()) {
    if (!it->is_object() || it->size() != 1) schema_error("/weighting", "expected {\"potential\": …} or {\"density\": […]}");
    if (auto p = it->find("potential"); p != it->end()) {
      weighting = Potential::from_expression(expression(*p, "/weighting/potential"));
    } else if (auto d = it->find("density"); d != it->end()) {
      if (!d->is_array() || d->size() != n) {
        schema_error("/weighting/density", "expected one expression per map (" + std::to_string(n) + ")");
      }
      std::vector<Expression> exprs;
      for (std::size_t k = 0; k < n; ++k) exprs.push_back(expression((*d)[k], "/weighting/density/" + std::to_string(k)));
      weighting = DensityFamily::from_expressions(std::move(exprs));
    } else {
      schema_error("/weighting", "expected \"potential\" or \"density\"");
    }
  }

  GridSettings grid;
  if (auto it = doc.find("grid"); it != doc.end()) grid = parse_grid(*it, box.dimension);
  if (box.dimension == 1) grid.nodes[1] = 1;

  SystemSpec spec(box, std::move(*params), std::move(maps), std::move(weighting), name);
  ValidationReport report = validate_system(spec, std::max(grid.nodes[0], grid.nodes[1]));
  if (raise_on_invalid) report.raise_if_failed();
  return Config{std::move(spec), grid, std::move(report)};
}

Config load_config(const std::filesystem::path& path, bool raise_on_invalid) {
  return parse_config(read_text(path), raise_on_invalid);
}

std::string config_to_json(const SystemSpec& spec, const GridSettings& grid) {
  const int dim = spec.dimension();
  const DomainBox& box = spec.domain();
  ordered_json doc;
  doc["version"] = kConfigVersion;
  doc["name"] = spec.name();
  doc["domain"]["lower"] = std::vector<double>(box.lower.begin(), box.lower.begin() + dim);
  doc["domain"]["upper"] = std::vector<double>(box.upper.begin(), box.upper.begin() + dim);
  ordered_json maps = ordered_json::array();
  for (std::size_t b = 0; b < spec.branch_count(); ++b) {
    ordered_json m;
    m["label"] = spec.params().label(b);
    if (const auto* a = std::get_if<AffineMap>(&spec.maps()[b])) {
      ordered_json rows = ordered_json::array();
      for (int r = 0; r < dim; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < dim; ++c) row.push_back(a->matrix[r * 2 + c]);
        rows.push_back(row);
      }
      m["matrix"] = rows;
      m["offset"] = std::vector<double>(a->offset.begin(), a->offset.begin() + dim);
    } else {
      const auto& e = std::get<ExpressionMap>(spec.maps()[b]);
      ordered_json exprs = ordered_json::array();
      for (const auto& c : e.coords) exprs.push_back(c.to_string());
      m["exprs"] = exprs;
    }
    maps.push_back(m);
  }
  doc["maps"] = maps;
  doc["apriori"] = spec.params().weights();
  if (const Potential* p = spec.potential()) {
    if (!p->expression()) throw Error(ErrorCode::InvalidArgument, "potential is not expression-backed");
    doc["weighting"]["potential"] = p->expression()->to_string();
  } else {
    const auto* exprs = spec.density()->expressions();
    if (!exprs) throw Error(ErrorCode::InvalidArgument, "density family is not expression-backed");
    ordered_json d = ordered_json::array();
    for (const auto& e : *exprs) d.push_back(e.to_string());
    doc["weighting"]["density"] = d;
  }
  if (dim == 1) {
    doc["grid"]["nodes"] = grid.nodes[0];
  } else {
    doc["grid"]["nodes"] = {grid.nodes[0], grid.nodes[1]};
  }
  doc["grid"]["interp"] = std::string(to_string(grid.interpolation));
  return doc.dump(2) + "\n";
}

void write_config(const SystemSpec& spec, const GridSettings& grid, const std::filesystem::path& path) {
  write_text(path, config_to_json(spec, grid));
}

SymbolSeries symbolize(std::span<const double> values, double threshold) {
  if (values.size() < 2) throw Error(ErrorCode::TooShort, "need at least two values, got " + std::to_string(values.size()));
  if (!(threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be nonnegative");
  SymbolSeries s;
  s.threshold = threshold;
  s.source_length = values.size();
  s.symbols.reserve(values.size() - 1);
  for (std::size_t t = 1; t < values.size(); ++t) {
    const double prev = values[t - 1];
    if (prev == 0.0) throw Error(ErrorCode::ZeroPreviousValue, "value at position " + std::to_string(t - 1) + " is zero");
    const double r = (values[t] - prev) / prev;
    int k;
    if (r < -threshold) {
      k = 0;
    } else if (r < 0.0) {
      k = 1;
    } else if (r < threshold) {
      k = 2;
    } else {
      k = 3;
    }
    s.symbols.push_back(static_cast<char>('A' + k));
    ++s.counts[k];
  }
  const double n = static_cast<double>(s.symbols.size());
  for (int k = 0; k < 4; ++k) s.frequencies[k] = static_cast<double>(s.counts[k]) / n;
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> to_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> parse_csv_column(std::string_view text, const ColumnSelector& column) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    if (!trim(line).empty()) rows.emplace_back(line_no, split_row(line));
    start = end + 1;
  }
  if (rows.empty()) return {};

  const auto& first = rows.front().second;
  std::size_t col = 0;
  bool header = false;
  if (column.name) {
    header = true;
    auto it = std::find(first.begin(), first.end(), std::string_view(*column.name));
    if (it == first.end()) throw Error(ErrorCode::InvalidArgument, "no column named \"" + *column.name + "\"");
    col = static_cast<std::size_t>(it - first.begin());
  } else if (column.index) {
    col = *column.index;
    if (col >= first.size()) throw Error(ErrorCode::InvalidArgument, "column index " + std::to_string(col) + " out of range");
  } else if (first.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "file has " + std::to_string(first.size()) + " columns; select one");
  }
  if (!header && !to_number(first[col])) header = true;

  std::vector<double> values;
  for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
    const auto& [ln, cells] = rows[r];
    if (col >= cells.size()) throw Error(ErrorCode::NonNumericCell, "line " + std::to_string(ln) + ": missing cell");
    const auto v = to_number(cells[col]);
    if (!v) throw Error(ErrorCode::NonNumericCell, "line " + std::to_string(ln) + ": \"" + std::string(cells[col]) + "\"");
    values.push_back(*v);
  }
  return values;
}

SymbolSeries ingest_timeseries(const std::filesystem::path& csv, double threshold, const ColumnSelector& column) {
  const std::vector<double> values = parse_csv_column(read_text(csv), column);
  return symbolize(values, threshold);
}

std::string emit_config(const SymbolSeries& series, std::string name) {
  const DomainBox box = DomainBox::unit(2);
  std::vector<BranchMap> maps;
  const std::array<Point, 4> offsets{Point{0.0, 0.0}, Point{0.5, 0.0}, Point{0.0, 0.5}, Point{0.5, 0.5}};
  for (const Point& o : offsets) maps.push_back(AffineMap{{0.5, 0.0, 0.0, 0.5}, o});
  std::vector<double> weights(series.frequencies.begin(), series.frequencies.end());
  SystemSpec spec(box, ParameterSet({"A", "B", "C", "D"}, weights), std::move(maps), Potential::constant(1.0),
                  std::move(name));
  return config_to_json(spec, GridSettings{{65, 65}, Interpolation::nearest});
}

std::string to_pgm(const ImageGrid& image) {
  std::string out = "P2\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      if (c) out += ' ';
      out += std::to_string(image.at(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_pgm(const ImageGrid& image, const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0) throw Error(ErrorCode::InvalidArgument, "image is empty");
  write_text(path, to_pgm(image));
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string report_json(const ValidationReport& r) {
  ordered_json j;
  j["passes"] = r.passes;
  j["nodes_checked"] = r.nodes_checked;
  j["sup_q"] = r.sup_q;
  j["inf_q"] = r.inf_q;
  j["max_escape"] = r.max_escape;
  j["maps_contained"] = r.maps_contained;
  j["normalized"] = r.normalized;
  ordered_json issues = ordered_json::array();
  for (const auto& i : r.issues) issues.push_back({{"code", std::string(to_string(i.code))}, {"message", i.message}});
  j["issues"] = issues;
  return dump(j);
}

std::string report_json(const SpectralResult& r, std::span<const GelfandPoint> gelfand) {
  ordered_json j;
  j["rho"] = r.rho;
  j["log_rho"] = r.log_rho;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["interpolation"] = std::string(to_string(r.interpolation));
  j["eigenfunction_min"] = r.eigenfunction.min();
  j["eigenfunction_max"] = r.eigenfunction.max();
  if (!gelfand.empty()) {
    ordered_json g = ordered_json::array();
    for (const auto& p : gelfand) g.push_back({{"n", p.n}, {"estimate", p.estimate}, {"spread", p.spread}});
    j["gelfand"] = g;
  }
  return dump(j);
}

std::string report_json(const EigenmeasureResult& r) {
  ordered_json j;
  j["rho_star"] = r.rho_star;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["weights"] = r.measure.weights;
  return dump(j);
}

std::string report_json(const EntropyReport& r) {
  ordered_json j;
  j["h_v"] = r.h_v;
  j["h_a"] = r.h_a;
  j["gap"] = r.gap;
  j["optimal_function_used"] = r.optimal_function_used;
  j["iterations"] = r.iterations;
  j["h_v_optimizer_trace"] = r.trace;
  return dump(j);
}

std::string report_json(const ThermoReport& r) {
  ordered_json j;
  j["rho"] = r.rho;
  j["log_rho"] = r.log_rho;
  j["pressure"] = r.pressure;
  j["variational_lower_bound"] = r.variational_lower_bound;
  j["equilibrium_defect"] = r.equilibrium_defect;
  j["form_gap"] = r.form_gap;
  j["h_v"] = r.h_v;
  j["integral_log_psi"] = r.integral_log_psi;
  j["h_a"] = r.h_a;
  j["rho_star"] = r.rho_star;
  j["invariance_residual"] = r.invariance_residual;
  j["power_iterations"] = r.power_iterations;
  j["optimizer_iterations"] = r.optimizer_iterations;
  j["marginal"] = r.marginal.weights;
  return dump(j);
}

std::string report_json(const PressureFunctionalProbe& r) {
  ordered_json j;
  j["base_value"] = r.base_value;
  j["convex"] = r.convex;
  j["worst_midpoint_gap"] = r.worst_midpoint_gap;
  if (r.worst_subgradient_slack) j["worst_subgradient_slack"] = *r.worst_subgradient_slack;
  ordered_json dirs = ordered_json::array();
  for (const auto& d : r.directions) {
    ordered_json e;
    e["t"] = d.t;
    e["values"] = d.values;
    e["quotients"] = d.quotients;
    e["richardson"] = d.richardson;
    e["monotone"] = d.monotone;
    e["midpoint_gap"] = d.midpoint.gap;
    if (d.nu_eta) e["nu_eta"] = *d.nu_eta;
    if (d.subgradient_slack) e["subgradient_slack"] = *d.subgradient_slack;
    dirs.push_back(e);
  }
  j["directions"] = dirs;
  return dump(j);
}

std::string report_json(const CellHistogram& h, const OrbitRecord& orbit) {
  ordered_json j;
  j["seed"] = orbit.seed;
  j["stream"] = orbit.stream;
  j["steps"] = orbit.length();
  j["clamped_steps"] = orbit.clamped_steps;
  j["level"] = h.level;
  j["samples"] = h.total;
  j["counts"] = h.counts;
  j["weights"] = h.weights();
  return dump(j);
}

std::string report_json(const SymbolSeries& s) {
  ordered_json j;
  j["source_length"] = s.source_length;
  j["threshold"] = s.threshold;
  j["symbols"] = s.symbols;
  ordered_json f;
  for (int k = 0; k < 4; ++k) f[std::string(1, static_cast<char>('A' + k))] = s.frequencies[k];
  j["frequencies"] = f;
  return dump(j);
}

}  // namespace ifsm

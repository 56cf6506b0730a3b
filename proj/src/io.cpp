#include "csa/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "csa/error.hpp"

namespace csa {

using nlohmann::json;

namespace {

constexpr const char* kAxisNames[] = {"x", "y", "z"};

void append_double(std::string& s, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  s.append(buf, std::size_t(n));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(line, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

long long parse_integer(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(line, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
  return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = Eigen::Index(j.size());
  const auto cols = rows ? Eigen::Index(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (Eigen::Index(j.at(std::size_t(i)).size()) != cols) throw IoError("ragged matrix in report");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[std::size_t(i)][std::size_t(k)].get<double>();
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

const char* existence_name(Existence e) {
  switch (e) {
    case Existence::Interior: return "interior";
    case Existence::BoundaryZero: return "boundary_zero";
    case Existence::Divergent: return "divergent";
  }
  return "interior";
}

Existence existence_from(const std::string& s) {
  if (s == "interior") return Existence::Interior;
  if (s == "boundary_zero") return Existence::BoundaryZero;
  if (s == "divergent") return Existence::Divergent;
  throw IoError("unknown existence tag '" + s + "'");
}

void check_schema(const json& j, const char* schema) {
  if (j.value("schema", std::string()) != schema)
    throw IoError(std::string("expected a ") + schema + " report");
  if (j.value("schema_version", 0) != kReportSchemaVersion)
    throw IoError(std::string("unsupported ") + schema + " schema version");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_sequence(std::ostream& out, const PointSequence& seq) {
  const int d = seq.params.dim;
  const bool counts = !seq.insertion_counts.empty();
  if (counts && seq.insertion_counts.size() != seq.points.size())
    throw ContractViolation("insertion counts do not match the points");
  json h;
  h["format"] = "csa-sequence";
  h["version"] = kSequenceFormatVersion;
  h["d"] = d;
  h["m"] = seq.params.volume;
  h["R"] = seq.params.radius;
  h["N"] = seq.beta_known ? json(seq.params.order()) : json(nullptr);
  h["beta"] = seq.beta_known ? json(seq.params.beta) : json(nullptr);
  h["seed"] = seq.seed ? json(*seq.seed) : json(nullptr);
  h["generator"] = seq.generator;
  h["resolution"] = seq.resolution;
  h["jammed"] = seq.jammed;
  h["shortfall"] = seq.shortfall;
  h["counts"] = counts;
  out << "# " << h.dump() << '\n';

  std::string line = "index";
  for (int a = 0; a < d; ++a) (line += ',') += kAxisNames[a];
  if (counts) line += ",count";
  out << line << '\n';
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    line = std::to_string(i);
    for (int a = 0; a < d; ++a) {
      line += ',';
      append_double(line, seq.points[i][std::size_t(a)]);
    }
    if (counts) (line += ',') += std::to_string(seq.insertion_counts[i]);
    out << line << '\n';
  }
}

void write_sequence(const std::filesystem::path& path, const PointSequence& seq) {
  auto out = open_out(path);
  write_sequence(out, seq);
  close_out(out, path);
}

PointSequence read_sequence(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty sequence file");
  std::string_view head = trim(line);
  if (head.empty() || head.front() != '#') throw ParseError(1, "missing '#' header line");
  head.remove_prefix(1);

  json h;
  try {
    h = json::parse(head);
  } catch (const json::parse_error& e) {
    throw ParseError(1, std::string("malformed header: ") + e.what());
  }

  PointSequence seq;
  bool counts = false;
  try {
    if (h.at("format").get<std::string>() != "csa-sequence") throw ParseError(1, "not a csa-sequence file");
    if (h.at("version").get<int>() != kSequenceFormatVersion) throw ParseError(1, "unsupported format version");
    seq.params.dim = h.at("d").get<int>();
    seq.params.volume = h.at("m").get<double>();
    seq.params.radius = h.at("R").get<double>();
    seq.beta_known = !h.at("beta").is_null();
    if (seq.beta_known) seq.params.beta = h["beta"].get<std::vector<double>>();
    if (!h.at("seed").is_null()) seq.seed = h["seed"].get<std::uint64_t>();
    seq.generator = h.value("generator", std::string());
    seq.resolution = h.value("resolution", 0.0);
    seq.jammed = h.value("jammed", false);
    seq.shortfall = h.value("shortfall", false);
    counts = h.at("counts").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("malformed header: ") + e.what());
  }
  if (seq.params.dim < 1 || seq.params.dim > 3) throw ParseError(1, "dimension must be 1, 2 or 3");
  if (!(seq.params.volume > 0.0) || !(seq.params.radius > 0.0))
    throw ParseError(1, "m and R must be positive");
  const Domain domain(seq.params.dim, seq.params.volume);

  const std::size_t columns = std::size_t(seq.params.dim) + 1 + (counts ? 1 : 0);
  ++lineno;
  if (!std::getline(in, line)) throw ParseError(lineno, "missing column header");
  if (split(trim(line), ',').size() != columns) throw ParseError(lineno, "wrong column count in column header");

  std::vector<double> coords(std::size_t(seq.params.dim));
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (fields.size() != columns)
      throw ParseError(lineno, "expected " + std::to_string(columns) + " columns, found " +
                                   std::to_string(fields.size()));
    const long long index = parse_integer(fields[0], lineno, "index");
    if (index != static_cast<long long>(seq.points.size()))
      throw ParseError(lineno, "row index " + std::to_string(index) + " out of order");
    for (std::size_t a = 0; a < coords.size(); ++a) coords[a] = parse_double(fields[a + 1], lineno, "coordinate");
    Point p(coords);
    if (!domain.contains(p)) throw ParseError(lineno, "row " + std::to_string(index) + " lies outside the domain");
    seq.points.push_back(p);
    if (counts) {
      const long long c = parse_integer(fields.back(), lineno, "count");
      if (c < 0) throw ParseError(lineno, "negative insertion count");
      seq.insertion_counts.push_back(static_cast<int>(c));
    }
  }
  return seq;
}

PointSequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_sequence(in);
}

void to_json(json& j, const CsaParams& p) {
  j = json{{"R", p.radius}, {"beta", p.beta}, {"m", p.volume}, {"d", p.dim}};
}

void from_json(const json& j, CsaParams& p) {
  p.radius = j.at("R").get<double>();
  p.beta = j.at("beta").get<std::vector<double>>();
  p.volume = j.at("m").get<double>();
  p.dim = j.at("d").get<int>();
}

void to_json(json& j, const Trajectory& t) {
  j = json{{"schema", "trajectory"},   {"schema_version", kReportSchemaVersion},
           {"length", t.length},       {"order", t.order},
           {"R", t.radius},            {"resolution", t.resolution},
           {"m", t.volume},            {"d", t.dim},
           {"t", t.t},                 {"xi", t.xi_path},
           {"gamma_path", t.gamma_path}, {"gamma_final", t.gamma_final}};
}

void from_json(const json& j, Trajectory& t) {
  check_schema(j, "trajectory");
  t.length = j.at("length").get<std::size_t>();
  t.order = j.at("order").get<int>();
  t.radius = j.at("R").get<double>();
  t.resolution = j.at("resolution").get<double>();
  t.volume = j.at("m").get<double>();
  t.dim = j.at("d").get<int>();
  t.t = j.at("t").get<std::vector<std::size_t>>();
  t.xi_path = j.at("xi").get<std::vector<int>>();
  t.gamma_path = j.at("gamma_path").get<std::vector<double>>();
  t.gamma_final = j.at("gamma_final").get<std::vector<double>>();
  if (t.gamma_path.size() != t.length * t.width() || t.xi_path.size() != t.length)
    throw IoError("trajectory arrays do not match its length");
}

void to_json(json& j, const MleResult& r) {
  j = json{{"schema", "mle"},
           {"schema_version", kReportSchemaVersion},
           {"beta_hat", std::vector<double>(r.beta_hat.values().begin(), r.beta_hat.values().end())},
           {"information", matrix_json(r.information)},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"gradient_norm", r.gradient_norm},
           {"log_likelihood", r.log_likelihood},
           {"existence", existence_name(r.existence)},
           {"existence_component", r.existence_component}};
}

void from_json(const json& j, MleResult& r) {
  check_schema(j, "mle");
  r.beta_hat = BetaVector(j.at("beta_hat").get<std::vector<double>>());
  r.information = matrix_from(j.at("information"));
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.gradient_norm = j.at("gradient_norm").get<double>();
  r.log_likelihood = j.at("log_likelihood").get<double>();
  r.existence = existence_from(j.at("existence").get<std::string>());
  r.existence_component = j.at("existence_component").get<int>();
}

void to_json(json& j, const ConfidenceIntervals& ci) {
  json bounds = json::array();
  for (const auto& [lo, hi] : ci.bounds) bounds.push_back({lo, hi});
  j = json{{"schema", "confidence_intervals"},
           {"schema_version", kReportSchemaVersion},
           {"level", ci.level},
           {"estimate", ci.estimate},
           {"std_error", ci.std_error},
           {"bounds", bounds}};
}

void from_json(const json& j, ConfidenceIntervals& ci) {
  check_schema(j, "confidence_intervals");
  ci.level = j.at("level").get<double>();
  ci.estimate = j.at("estimate").get<std::vector<double>>();
  ci.std_error = j.at("std_error").get<std::vector<double>>();
  ci.bounds.clear();
  for (const auto& b : j.at("bounds")) ci.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
}

void to_json(json& j, const CltReport& r) {
  j = json{{"schema", "clt"},
           {"schema_version", kReportSchemaVersion},
           {"kind", r.kind},
           {"params", r.params},
           {"density", r.density},
           {"jam_density", r.jam_density},
           {"length", r.length},
           {"replications", r.replications},
           {"seed", r.seed},
           {"generator", std::string(kGeneratorVersion)},
           {"mean", vector_json(r.mean)},
           {"covariance", matrix_json(r.covariance)},
           {"reference_covariance", matrix_json(r.reference_covariance)},
           {"skewness", r.skewness},
           {"excess_kurtosis", r.excess_kurtosis},
           {"ks_pvalues", r.ks_pvalues},
           {"projection_ks_pvalues", r.projection_ks_pvalues},
           {"mean_quadratic_variation", matrix_json(r.mean_quadratic_variation)},
           {"coverage", r.coverage},
           {"variance", vector_json(r.variance)},
           {"failures", r.failures},
           {"unstable", r.unstable},
           {"variance_limit_diagonal", r.variance_limit_diagonal},
           {"variance_limit_eigen", r.variance_limit_eigen},
           {"samples", matrix_json(r.samples)}};
}

void from_json(const json& j, CltReport& r) {
  check_schema(j, "clt");
  r.kind = j.at("kind").get<std::string>();
  r.params = j.at("params").get<CsaParams>();
  r.density = j.at("density").get<double>();
  r.jam_density = j.at("jam_density").get<double>();
  r.length = j.at("length").get<std::size_t>();
  r.replications = j.at("replications").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mean = vector_from(j.at("mean"));
  r.covariance = matrix_from(j.at("covariance"));
  r.reference_covariance = matrix_from(j.at("reference_covariance"));
  r.skewness = j.at("skewness").get<std::vector<double>>();
  r.excess_kurtosis = j.at("excess_kurtosis").get<std::vector<double>>();
  r.ks_pvalues = j.at("ks_pvalues").get<std::vector<double>>();
  r.projection_ks_pvalues = j.at("projection_ks_pvalues").get<std::vector<double>>();
  r.mean_quadratic_variation = matrix_from(j.at("mean_quadratic_variation"));
  r.coverage = j.at("coverage").get<std::vector<double>>();
  r.variance = vector_from(j.at("variance"));
  r.failures = j.at("failures").get<std::size_t>();
  r.unstable = j.at("unstable").get<bool>();
  r.variance_limit_diagonal = j.at("variance_limit_diagonal").get<std::vector<double>>();
  r.variance_limit_eigen = j.at("variance_limit_eigen").get<std::vector<double>>();
  r.samples = matrix_from(j.at("samples"));
}

void to_json(json& j, const LimitCurves& c) {
  j = json{{"schema", "limit_curves"},
           {"schema_version", kReportSchemaVersion},
           {"params", c.params},
           {"density", c.density},
           {"jam_density", c.jam_density},
           {"replications", c.replications},
           {"seed", c.seed},
           {"generator", std::string(kGeneratorVersion)},
           {"lambda", c.lambda},
           {"steps", c.steps},
           {"gamma", c.gamma},
           {"rho", c.rho}};
}

void from_json(const json& j, LimitCurves& c) {
  check_schema(j, "limit_curves");
  c.params = j.at("params").get<CsaParams>();
  c.density = j.at("density").get<double>();
  c.jam_density = j.at("jam_density").get<double>();
  c.replications = j.at("replications").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.lambda = j.at("lambda").get<std::vector<double>>();
  c.steps = j.at("steps").get<std::vector<std::size_t>>();
  c.gamma = j.at("gamma").get<std::vector<std::vector<double>>>();
  c.rho = j.at("rho").get<std::vector<std::vector<double>>>();
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  close_out(out, path);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

void write_report(const std::filesystem::path& path, const MleResult& r) { write_json(path, json(r)); }
void write_report(const std::filesystem::path& path, const ConfidenceIntervals& ci) { write_json(path, json(ci)); }
void write_report(const std::filesystem::path& path, const CltReport& r) { write_json(path, json(r)); }

void write_report(const std::filesystem::path& path, const LimitCurves& c) {
  write_json(path, json(c));
  auto csv_path = path;
  csv_path.replace_extension(".csv");
  auto out = open_out(csv_path);
  write_curves_csv(out, c);
  close_out(out, csv_path);
}

void write_curves_csv(std::ostream& out, const LimitCurves& c) {
  const int n = c.order();
  std::string line = "lambda,step";
  for (int j = 0; j <= n; ++j) line += ",gamma_" + std::to_string(j);
  for (int j = 0; j <= n; ++j) line += ",rho_" + std::to_string(j);
  out << line << '\n';
  for (std::size_t i = 0; i < c.node_count(); ++i) {
    line.clear();
    append_double(line, c.lambda[i]);
    line += ',' + std::to_string(c.steps[i]);
    for (double v : c.gamma[i]) append_double(line += ',', v);
    for (double v : c.rho[i]) append_double(line += ',', v);
    out << line << '\n';
  }
}

}  // namespace csa

#include "covext/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "covext/errors.hpp"

namespace covext {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  Throw(ErrorKind::kInvalidInput, where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) bad(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(where, "expected a finite number");
  return x;
}

int integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) bad(where, "expected an integer");
  return v.get<int>();
}

VectorXd real_array(const Json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array of numbers");
  VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(i) = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Eigen::VectorXcd complex_array(const Json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array of [re, im] pairs");
  Eigen::VectorXcd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) bad(at, "expected [re, im]");
    out(i) = {number(v[i][0], at), number(v[i][1], at)};
  }
  return out;
}

Json to_array(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_pairs(const Eigen::VectorXcd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(Json::array({v(i).real(), v(i).imag()}));
  }
  return out;
}

void only_known_fields(const Json& obj, std::initializer_list<const char*> known,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) bad(where, "unknown field '" + key + "'");
  }
}

ProblemKind parse_kind(const Json& v, const std::string& where) {
  if (v == "covariance") return ProblemKind::kCovariance;
  if (v == "interpolation") return ProblemKind::kInterpolation;
  bad(where, "kind must be \"covariance\" or \"interpolation\"");
}

FileOptions parse_options(const Json& v) {
  const std::string where = "options";
  if (!v.is_object()) bad(where, "expected an object");
  only_known_fields(v, {"tol", "max_iter", "method", "rank_tol", "samples"},
                    where);
  FileOptions out;
  if (v.contains("tol")) out.tol = number(v["tol"], "options.tol");
  if (v.contains("max_iter")) {
    out.max_iter = integer(v["max_iter"], "options.max_iter");
  }
  if (v.contains("method")) {
    if (!v["method"].is_string()) bad("options.method", "expected a string");
    out.method = v["method"].get<std::string>();
    parse_method(*out.method);
  }
  if (v.contains("rank_tol")) {
    out.rank_tol = number(v["rank_tol"], "options.rank_tol");
  }
  if (v.contains("samples")) {
    out.samples = integer(v["samples"], "options.samples");
  }
  return out;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::kCovariance ? "covariance" : "interpolation";
}

int ProblemFile::n() const {
  return kind == ProblemKind::kCovariance ? static_cast<int>(c.size()) - 1
                                          : data.n();
}

VectorXd ProblemFile::sigma_or_default() const {
  return sigma ? *sigma : VectorXd::Zero(n());
}

ProblemFile parse_problem(const Json& doc) {
  if (!doc.is_object()) bad("problem", "expected a JSON object");
  ProblemFile out;
  out.kind = parse_kind(field(doc, "kind", "problem"), "kind");
  if (out.kind == ProblemKind::kCovariance) {
    only_known_fields(doc, {"kind", "c", "sigma", "options", "diagnostics"},
                      "problem");
    out.c = real_array(field(doc, "c", "problem"), "c");
    if (out.c.size() < 1) bad("c", "needs at least c_0");
  } else {
    only_known_fields(doc, {"kind", "nodes", "values", "sigma", "options"},
                      "problem");
    out.data.nodes = complex_array(field(doc, "nodes", "problem"), "nodes");
    out.data.values = complex_array(field(doc, "values", "problem"), "values");
    if (out.data.nodes.size() < 1) bad("nodes", "needs at least one node");
    if (out.data.values.size() != out.data.nodes.size()) {
      bad("values", "length differs from nodes");
    }
  }
  if (doc.contains("sigma")) {
    out.sigma = real_array(doc["sigma"], "sigma");
    if (out.sigma->size() != out.n()) {
      bad("sigma", "expected " + std::to_string(out.n()) + " coefficients");
    }
  }
  if (doc.contains("options")) out.options = parse_options(doc["options"]);
  if (doc.contains("diagnostics")) {
    if (!doc["diagnostics"].is_object()) bad("diagnostics", "expected an object");
    out.diagnostics = doc["diagnostics"];
  }
  return out;
}

Json problem_to_json(const ProblemFile& problem) {
  Json doc;
  doc["kind"] = to_string(problem.kind);
  if (problem.kind == ProblemKind::kCovariance) {
    doc["c"] = to_array(problem.c);
  } else {
    doc["nodes"] = to_pairs(problem.data.nodes);
    doc["values"] = to_pairs(problem.data.values);
  }
  if (problem.sigma) doc["sigma"] = to_array(*problem.sigma);
  const FileOptions& o = problem.options;
  Json opts = Json::object();
  if (o.tol) opts["tol"] = *o.tol;
  if (o.max_iter) opts["max_iter"] = *o.max_iter;
  if (o.method) opts["method"] = *o.method;
  if (o.rank_tol) opts["rank_tol"] = *o.rank_tol;
  if (o.samples) opts["samples"] = *o.samples;
  if (!opts.empty()) doc["options"] = std::move(opts);
  if (!problem.diagnostics.is_null()) doc["diagnostics"] = problem.diagnostics;
  return doc;
}

std::string content_hash(const Json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool SolutionFile::all_pass() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const Check& c : checks) {
    out.push_back({{"name", c.name},
                   {"value", c.value},
                   {"relation", c.relation},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
  }
  return out;
}

Json solution_to_json(const SolutionFile& sol) {
  Json doc;
  doc["format"] = "covext-solution/1";
  doc["kind"] = to_string(sol.kind);
  doc["n"] = sol.a.size();
  doc["sigma"] = to_array(sol.sigma);
  doc["a"] = to_array(sol.a);
  doc["b"] = to_array(sol.b);
  doc["rho"] = sol.rho;
  Json flat = Json::array();
  for (Eigen::Index i = 0; i < sol.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < sol.P.cols(); ++j) flat.push_back(sol.P(i, j));
  }
  doc["P"] = std::move(flat);
  doc["rank"] = sol.rank;
  doc["residual"] = sol.residual;
  doc["positive_real_min"] = sol.positive_real_min;
  doc["spectral_identity_residual"] = sol.spectral_identity_residual;
  if (sol.covariance_match) doc["covariance_match"] = *sol.covariance_match;
  if (sol.c0) doc["c0"] = *sol.c0;
  if (sol.interp_residual) doc["interp_residual"] = *sol.interp_residual;
  if (sol.scale) doc["scale"] = *sol.scale;
  if (sol.first_row_residual) {
    doc["first_row_residual"] = *sol.first_row_residual;
  }
  doc["checks"] = checks_to_json(sol.checks);
  doc["all_checks_pass"] = sol.all_pass();
  const Provenance& p = sol.provenance;
  Json prov;
  prov["input_hash"] = p.input_hash;
  prov["method"] = p.method;
  prov["fixed_point_converged"] = p.fixed_point_converged;
  prov["iterations"] = p.iterations;
  prov["path_steps"] = p.path_steps;
  prov["tolerances"] = {{"tol", p.tol},
                        {"max_iter", p.max_iter},
                        {"rank_tol", p.rank_tol},
                        {"samples", p.samples}};
  if (!p.factor.empty()) {
    prov["factor"] = p.factor;
    prov["tolerances"]["accept_tol"] = p.accept_tol;
  }
  doc["provenance"] = std::move(prov);
  return doc;
}

SolutionFile parse_solution(const Json& doc) {
  const std::string where = "solution";
  if (!doc.is_object()) bad(where, "expected a JSON object");
  if (field(doc, "format", where) != "covext-solution/1") {
    bad("format", "expected \"covext-solution/1\"");
  }
  SolutionFile sol;
  sol.kind = parse_kind(field(doc, "kind", where), "kind");
  const int n = integer(field(doc, "n", where), "n");
  if (n < 0) bad("n", "must be nonnegative");
  auto sized = [&](const char* key) {
    VectorXd v = real_array(field(doc, key, where), key);
    if (v.size() != n) bad(key, "expected " + std::to_string(n) + " entries");
    return v;
  };
  sol.sigma = sized("sigma");
  sol.a = sized("a");
  sol.b = sized("b");
  sol.rho = number(field(doc, "rho", where), "rho");
  const VectorXd flat = real_array(field(doc, "P", where), "P");
  if (flat.size() != static_cast<Eigen::Index>(n) * n) {
    bad("P", "expected n*n = " + std::to_string(n * n) + " entries");
  }
  sol.P = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(flat.data(), n, n);
  sol.rank = integer(field(doc, "rank", where), "rank");
  sol.residual = number(field(doc, "residual", where), "residual");
  sol.positive_real_min =
      number(field(doc, "positive_real_min", where), "positive_real_min");
  if (doc.contains("spectral_identity_residual")) {
    sol.spectral_identity_residual =
        number(doc["spectral_identity_residual"], "spectral_identity_residual");
  }
  auto optional_number = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key)) return std::nullopt;
    return number(doc[key], key);
  };
  sol.covariance_match = optional_number("covariance_match");
  sol.c0 = optional_number("c0");
  sol.interp_residual = optional_number("interp_residual");
  sol.scale = optional_number("scale");
  sol.first_row_residual = optional_number("first_row_residual");
  if (sol.kind == ProblemKind::kCovariance && !sol.covariance_match) {
    bad(where, "covariance solution lacks covariance_match");
  }
  if (sol.kind == ProblemKind::kInterpolation && !sol.interp_residual) {
    bad(where, "interpolation solution lacks interp_residual");
  }
  if (doc.contains("checks")) {
    const Json& checks = doc["checks"];
    if (!checks.is_array()) bad("checks", "expected an array");
    for (const Json& c : checks) {
      if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
        bad("checks", "entries need a string name");
      }
      sol.checks.push_back({c["name"].get<std::string>(),
                            number(field(c, "value", "checks"), "checks.value"),
                            c.value("relation", std::string()),
                            number(field(c, "tolerance", "checks"),
                                   "checks.tolerance"),
                            field(c, "pass", "checks").get<bool>()});
    }
  }
  const Json& prov = field(doc, "provenance", where);
  if (!prov.is_object()) bad("provenance", "expected an object");
  Provenance& p = sol.provenance;
  p.input_hash = field(prov, "input_hash", "provenance").get<std::string>();
  p.method = field(prov, "method", "provenance").get<std::string>();
  p.fixed_point_converged = prov.value("fixed_point_converged", false);
  p.iterations = integer(field(prov, "iterations", "provenance"),
                         "provenance.iterations");
  p.path_steps = prov.value("path_steps", 0);
  const Json& tols = field(prov, "tolerances", "provenance");
  p.tol = number(field(tols, "tol", "provenance.tolerances"), "tol");
  p.max_iter = integer(field(tols, "max_iter", "provenance.tolerances"),
                       "max_iter");
  p.rank_tol =
      number(field(tols, "rank_tol", "provenance.tolerances"), "rank_tol");
  p.samples = integer(field(tols, "samples", "provenance.tolerances"), "samples");
  p.factor = prov.value("factor", std::string());
  if (tols.contains("accept_tol")) {
    p.accept_tol = number(tols["accept_tol"], "accept_tol");
  }
  return sol;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorKind::kInvalidInput, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    Throw(ErrorKind::kInvalidInput, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) Throw(ErrorKind::kInvalidInput, "cannot write '" + path + "'");
  out << text;
}

void write_json(const Json& doc, const std::string& path) {
  write_text(doc.dump(2) + "\n", path);
}

std::vector<double> parse_series_csv(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line.find(',') != std::string::npos) {
      Throw(ErrorKind::kInvalidInput,
            "CSV line " + std::to_string(line_no) + ": expected one column");
    }
    const std::size_t last = line.find_last_not_of(" \t");
    const std::string cell = line.substr(first, last - first + 1);
    double x = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), x);
    const bool numeric = ec == std::errc() && ptr == cell.data() + cell.size();
    if (!numeric || !std::isfinite(x)) {
      if (out.empty() && line_no == 1) continue;  // header row
      Throw(ErrorKind::kInvalidInput, "CSV line " + std::to_string(line_no) +
                                          ": '" + cell + "' is not a number");
    }
    out.push_back(x);
  }
  if (out.empty()) Throw(ErrorKind::kInvalidInput, "CSV contains no data");
  return out;
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorKind::kInvalidInput, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series_csv(buf.str());
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace covext

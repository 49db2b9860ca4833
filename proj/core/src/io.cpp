#include "randblock/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "randblock/error.hpp"

namespace randblock {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

SingleSiteDistribution distribution_from(const json& r) {
  if (!r.is_object()) throw ConfigError("'rho' must be an object");
  const auto kind = require<std::string>(r, "kind");
  if (kind == "two_point") {
    return SingleSiteDistribution::two_point(require<double>(r, "a"), require<double>(r, "b"),
                                             require<double>(r, "p"));
  }
  if (kind == "uniform") return SingleSiteDistribution::uniform(require<double>(r, "a"), require<double>(r, "b"));
  if (kind == "discrete") {
    return SingleSiteDistribution::discrete(require<std::vector<double>>(r, "points"),
                                            require<std::vector<double>>(r, "weights"));
  }
  if (kind == "constant") return SingleSiteDistribution::constant(require<double>(r, "c"));
  throw ConfigError("unknown rho kind '" + kind + "'");
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

ModelConfig parse_model_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  ModelConfig cfg;
  const int ell = j.contains("ell") ? require<int>(j, "ell") : 2;
  if (ell != 2) throw ConfigError("'ell' must be 2 for the XY field model");
  const int n = require<int>(j, "n");
  if (n < 1) throw ConfigError("'n' must be positive");
  cfg.gamma = require<double>(j, "gamma");
  cfg.seed = j.contains("seed") ? require<std::uint64_t>(j, "seed") : 0;
  const auto rho = distribution_from(j.contains("rho") ? j.at("rho") : json());

  std::vector<double> mu;
  if (!j.contains("mu")) {
    mu.assign(static_cast<std::size_t>(std::max(n - 1, 0)), 1.0);
  } else if (j.at("mu").is_string()) {
    const auto s = j.at("mu").get<std::string>();
    if (s.rfind("const:", 0) != 0) throw ConfigError("'mu' string must look like \"const:1.0\"");
    try {
      cfg.mu = std::stod(s.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("'mu' constant is not a number");
    }
    mu.assign(static_cast<std::size_t>(std::max(n - 1, 0)), cfg.mu);
  } else {
    mu = require<std::vector<double>>(j, "mu");
    if (!mu.empty()) cfg.mu = mu.front();
  }
  cfg.params = ModelParams::xy(n, cfg.gamma, rho, cfg.mu);
  cfg.params.mu = mu;
  cfg.params.validate();
  return cfg;
}

SingleSiteDistribution parse_distribution(std::string_view json_text) {
  return distribution_from(parse_json(json_text));
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(std::int64_t x) { return cell(std::to_string(x)); }
CsvWriter& CsvWriter::cell(std::uint64_t x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (in_row_ == columns_) throw ConfigError("CsvWriter: too many cells in row");
  out_ << (in_row_ ? "," : "") << s;
  ++in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw ConfigError("CsvWriter: row has " + std::to_string(in_row_) + " cells");
  out_ << '\n';
  in_row_ = 0;
}

void write_matrix_csv(std::ostream& out, const Mat& M, int n, int ell) {
  out << "# randblock matrix n=" << n << " ell=" << ell << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << format_double(M(i, j));
    out << '\n';
  }
}

MatrixDump read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("matrix dump: empty input");
  MatrixDump d;
  if (std::sscanf(line.c_str(), "# randblock matrix n=%d ell=%d", &d.n, &d.ell) != 2) {
    throw ConfigError("matrix dump: bad header '" + line + "'");
  }
  const int dim = d.n * d.ell;
  d.matrix.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!std::getline(in, line)) throw ConfigError("matrix dump: truncated");
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < dim; ++j) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("matrix dump: short row " + std::to_string(i));
      d.matrix(i, j) = std::stod(cell);
    }
  }
  return d;
}

ConventionRecord parse_convention(std::string_view json_text) {
  const json j = parse_json(json_text);
  return {require<double>(j, "scale"), require<double>(j, "shift_per_site")};
}

ConventionRecord load_convention(const std::string& path) { return parse_convention(read_text_file(path)); }

std::string convention_json(const ConventionRecord& rec) {
  json j;
  j["scale"] = rec.scale;
  j["shift_per_site"] = rec.shift_per_site;
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace randblock

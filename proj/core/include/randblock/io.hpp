#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "randblock/model.hpp"
#include "randblock/types.hpp"

namespace randblock {

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double x);

/// Model part of a JSON run configuration:
/// {"ell":2,"n":..,"gamma":..,"mu":"const:1.0" | [..],
///  "rho":{"kind":"two_point","a":..,"b":..,"p":..} | {"kind":"uniform","a":..,"b":..}
///        | {"kind":"discrete","points":[..],"weights":[..]},
///  "seed":..}
struct ModelConfig {
  ModelParams params;
  double gamma = 0.0;  // the constant anisotropy, echoed for ensemble construction
  double mu = 1.0;     // constant coupling when given as "const:x", else mu[0]
  std::uint64_t seed = 0;
};

/// Throws ConfigError with the offending key on any schema violation.
ModelConfig parse_model_config(std::string_view json_text);
SingleSiteDistribution parse_distribution(std::string_view json_text);

/// Minimal CSV emitter: one header line, comma-separated rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(double x);
  CsvWriter& cell(std::int64_t x);
  CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
  CsvWriter& cell(std::uint64_t x);
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Dense dump: "# randblock matrix n=.. ell=.." then row-major CSV.
void write_matrix_csv(std::ostream& out, const Mat& M, int n, int ell);

struct MatrixDump {
  int n = 0;
  int ell = 0;
  Mat matrix;
};

MatrixDump read_matrix_csv(std::istream& in);

/// H = scale * C^* Mhat C + (n * shift_per_site) I, stored as JSON.
struct ConventionRecord {
  double scale = 1.0;
  double shift_per_site = 0.0;
};

ConventionRecord parse_convention(std::string_view json_text);
ConventionRecord load_convention(const std::string& path);
std::string convention_json(const ConventionRecord& rec);

/// Whole file as a string; throws ConfigError if unreadable.
std::string read_text_file(const std::string& path);

}  // namespace randblock

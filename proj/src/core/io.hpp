#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pde.hpp"
#include "profile_ode.hpp"

namespace selfsim {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_double(double v);

std::string to_csv(const Table& table);
/// Throws Error(Io) naming the path when the file cannot be written.
void write_csv(const std::string& path, const Table& table);
/// Numeric CSV with a header line.
Table read_csv(const std::string& path);

using Summary = nlohmann::ordered_json;

/// Pretty-printed JSON, insertion-ordered keys, trailing newline.
std::string summary_text(const Summary& s);
void write_summary(const std::string& path, const Summary& s);
Summary read_summary(const std::string& path);

/// Everything a command may take from a config file. Fields absent from the
/// file keep their defaults.
struct RunConfig {
  int schema = 1;
  int N = 2;
  double p = 1.5;
  IntegratorOptions ode;
  PdeConfig pde;  ///< params filled from N and p by load_config
  double tol_a = 1e-10;
  std::string out;
};

/// Parses a config JSON object. Unknown keys and a schema other than 1 are
/// InvalidArgument errors naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const RunConfig& c);

}  // namespace selfsim

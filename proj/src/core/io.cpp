#include "io.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace selfsim {

std::string format_double(double v) {
  char buf[64];
  // std::to_chars ignores the C locale, which keeps the separator a '.'
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing: " + std::strerror(errno));
  }
  f << text;
  f.flush();
  if (!f) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading: " + std::strerror(errno));
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

void write_csv(const std::string& path, const Table& table) { write_text(path, to_csv(table)); }

Table read_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "'" + path + "' is empty");
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) t.columns.push_back(col);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      const auto* b = cell.data();
      const auto res = std::from_chars(b, b + cell.size(), v);
      if (res.ec != std::errc()) {
        throw Error(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) {
      throw Error(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": wrong column count");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string summary_text(const Summary& s) { return s.dump(2) + "\n"; }

void write_summary(const std::string& path, const Summary& s) { write_text(path, summary_text(s)); }

Summary read_summary(const std::string& path) {
  try {
    return Summary::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Io, "'" + path + "': " + e.what());
  }
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + where + key + "'");
    }
  }
}

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) {
    try {
      dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("config key '") + key + "' has the wrong type");
    }
  }
}

InitKind init_from_string(const std::string& s) {
  if (s == "exp_tail") return InitKind::ExpTail;
  if (s == "separable") return InitKind::Separable;
  if (s == "custom") return InitKind::Custom;
  throw Error(ErrorCode::InvalidArgument, "pde.init must be exp_tail, separable or custom");
}

const char* init_to_string(InitKind k) {
  switch (k) {
    case InitKind::ExpTail: return "exp_tail";
    case InitKind::Separable: return "separable";
    case InitKind::Custom: return "custom";
  }
  return "?";
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  reject_unknown(j, {"schema", "N", "p", "ode", "pde", "tol_a", "out"}, "");
  RunConfig c;
  take(j, "schema", c.schema);
  if (c.schema != 1) throw Error(ErrorCode::InvalidArgument, "unsupported config schema (expected 1)");
  take(j, "N", c.N);
  take(j, "p", c.p);
  take(j, "tol_a", c.tol_a);
  take(j, "out", c.out);
  if (j.contains("ode")) {
    const auto& o = j.at("ode");
    reject_unknown(o, {"rel_tol", "abs_tol", "r_max", "eps_start", "j_neg_threshold"}, "ode.");
    take(o, "rel_tol", c.ode.rel_tol);
    take(o, "abs_tol", c.ode.abs_tol);
    take(o, "r_max", c.ode.r_max);
    take(o, "eps_start", c.ode.eps_start);
    take(o, "j_neg_threshold", c.ode.j_neg_threshold);
  }
  if (j.contains("pde")) {
    const auto& o = j.at("pde");
    reject_unknown(o, {"kappa0", "init", "T0", "eps_reg", "cfl_safety", "ext_tol", "R_inf", "M",
                       "dt_theta", "time_order", "snapshots_per_decade", "max_steps"},
                   "pde.");
    take(o, "kappa0", c.pde.kappa0);
    if (o.contains("init")) {
      std::string s;
      take(o, "init", s);
      c.pde.init = init_from_string(s);
    }
    take(o, "T0", c.pde.T0);
    take(o, "eps_reg", c.pde.eps_reg);
    take(o, "cfl_safety", c.pde.cfl_safety);
    take(o, "ext_tol", c.pde.ext_tol);
    take(o, "R_inf", c.pde.R_inf);
    take(o, "M", c.pde.M);
    take(o, "dt_theta", c.pde.dt_theta);
    take(o, "time_order", c.pde.time_order);
    take(o, "snapshots_per_decade", c.pde.snapshots_per_decade);
    take(o, "max_steps", c.pde.max_steps);
  }
  c.pde.params = make_params(c.N, c.p);
  return c;
}

RunConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "'" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["schema"] = c.schema;
  j["N"] = c.N;
  j["p"] = c.p;
  j["ode"] = {{"rel_tol", c.ode.rel_tol},
              {"abs_tol", c.ode.abs_tol},
              {"r_max", c.ode.r_max},
              {"eps_start", c.ode.eps_start},
              {"j_neg_threshold", c.ode.j_neg_threshold}};
  j["pde"] = {{"kappa0", c.pde.kappa0},
              {"init", init_to_string(c.pde.init)},
              {"T0", c.pde.T0},
              {"eps_reg", c.pde.eps_reg},
              {"cfl_safety", c.pde.cfl_safety},
              {"ext_tol", c.pde.ext_tol},
              {"R_inf", c.pde.R_inf},
              {"M", c.pde.M},
              {"dt_theta", c.pde.dt_theta},
              {"time_order", c.pde.time_order},
              {"snapshots_per_decade", c.pde.snapshots_per_decade},
              {"max_steps", c.pde.max_steps}};
  j["tol_a"] = c.tol_a;
  j["out"] = c.out;
  return j;
}

}  // namespace selfsim

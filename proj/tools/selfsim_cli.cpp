// selfsim command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "selfsim/selfsim.h"

namespace {

using ojson = nlohmann::ordered_json;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct Failure {
  selfsim_status status;
  std::string message;
};

int exit_for(selfsim_status s) {
  switch (s) {
    case SELFSIM_OK: return kOk;
    case SELFSIM_E_OUT_OF_RANGE:
    case SELFSIM_E_INVALID_ARGUMENT:
    case SELFSIM_E_DOMAIN:
      return kUsage;
    default:
      return kNumerical;
  }
}

void check(selfsim_status s, const std::string& what) {
  if (s != SELFSIM_OK) {
    throw Failure{s, what + ": " + selfsim_status_name(s) + ": " + selfsim_last_error()};
  }
}

struct ParamsDeleter {
  void operator()(selfsim_params* p) const { selfsim_params_destroy(p); }
};
struct TableDeleter {
  void operator()(selfsim_table* t) const { selfsim_table_destroy(t); }
};
struct PdeDeleter {
  void operator()(selfsim_pde_result* r) const { selfsim_pde_result_destroy(r); }
};
using ParamsPtr = std::unique_ptr<selfsim_params, ParamsDeleter>;
using TablePtr = std::unique_ptr<selfsim_table, TableDeleter>;
using PdePtr = std::unique_ptr<selfsim_pde_result, PdeDeleter>;

// Options shared by every command; a config file supplies defaults that
// explicit flags override.
struct Common {
  std::string config;
  int N = 2;
  double p = 1.5;
  selfsim_ode_options ode{};
  std::string out;
  double tol_a = 1e-10;
  selfsim_pde_options pde{};
};

void add_common(CLI::App* cmd, Common& c, bool ode = true) {
  cmd->add_option("--config", c.config, "JSON config (schema 1)");
  cmd->add_option("--N", c.N, "space dimension");
  cmd->add_option("--p", c.p, "diffusion exponent, 2N/(N+1) < p < 2");
  cmd->add_option("--out", c.out, "output path or prefix");
  if (ode) {
    cmd->add_option("--rel-tol", c.ode.rel_tol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", c.ode.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--rmax", c.ode.r_max, "integration horizon");
  }
}

// Applies the config file underneath the flags that were given explicitly.
void resolve(CLI::App* cmd, Common& c) {
  if (c.config.empty()) return;
  selfsim_config cfg;
  check(selfsim_config_load(c.config.c_str(), &cfg), "config");
  auto unset = [&](const char* flag) {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  if (unset("--N")) c.N = cfg.N;
  if (unset("--p")) c.p = cfg.p;
  if (unset("--out") && cfg.out[0]) c.out = cfg.out;
  const auto given = c.ode;
  c.ode = cfg.ode;
  if (!unset("--rel-tol")) c.ode.rel_tol = given.rel_tol;
  if (!unset("--abs-tol")) c.ode.abs_tol = given.abs_tol;
  if (!unset("--rmax")) c.ode.r_max = given.r_max;
  if (unset("--tol")) c.tol_a = cfg.tol_a;
  const auto pgiven = c.pde;
  c.pde = cfg.pde;
  if (!unset("--M")) c.pde.M = pgiven.M;
  if (!unset("--R")) c.pde.R_inf = pgiven.R_inf;
  if (!unset("--T0")) c.pde.T0 = pgiven.T0;
  if (!unset("--kappa0")) c.pde.kappa0 = pgiven.kappa0;
  if (!unset("--theta")) c.pde.dt_theta = pgiven.dt_theta;
  if (!unset("--init")) c.pde.init = pgiven.init;
}

ParamsPtr make_params(const Common& c) {
  selfsim_params* p = nullptr;
  check(selfsim_params_create(c.N, c.p, &p), "params");
  return ParamsPtr(p);
}

ojson ode_json(const selfsim_ode_options& o) {
  return {{"rel_tol", o.rel_tol}, {"abs_tol", o.abs_tol}, {"r_max", o.r_max}, {"eps_start", o.eps_start},
          {"j_neg_threshold", o.j_neg_threshold}};
}

ojson tolerance_check(double value, const char* relation, double bound, bool pass) {
  return {{"value", value}, {"relation", relation}, {"tolerance", bound}, {"pass", pass}};
}

// Summary documents hold data only; the version goes to a sidecar so that
// identical inputs give byte-identical summaries.
void emit_summary(const ojson& s, const std::string& path) {
  if (path.empty()) {
    std::cout << s.dump(2) << '\n';
    return;
  }
  check(selfsim_summary_write(path.c_str(), s.dump().c_str()), "write summary");
  ojson meta = {{"schema", 1}, {"version", selfsim_version()}};
  check(selfsim_summary_write((path + ".meta").c_str(), meta.dump().c_str()), "write sidecar");
}

void emit_table(const selfsim_table* t, const std::string& path) {
  if (!path.empty()) {
    check(selfsim_table_write_csv(t, path.c_str()), "write csv");
    return;
  }
  const size_t nc = selfsim_table_cols(t), nr = selfsim_table_rows(t);
  for (size_t c = 0; c < nc; ++c) std::cout << (c ? "," : "") << selfsim_table_column(t, c);
  std::cout << '\n';
  char buf[40];
  for (size_t r = 0; r < nr; ++r) {
    for (size_t c = 0; c < nc; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", selfsim_table_value(t, r, c));
      std::cout << (c ? "," : "") << buf;
    }
    std::cout << '\n';
  }
}

ojson ground_state_json(const selfsim_ground_state& g, double tol_a) {
  ojson j;
  j["a_lo"] = g.a_lo;
  j["a_hi"] = g.a_hi;
  j["a_star"] = g.a_star;
  j["l_star"] = g.l_star;
  j["c_star"] = g.c_star;
  j["trust_radius"] = g.trust_radius;
  j["plateau"] = {g.plateau_r1, g.plateau_r2};
  j["iterations"] = g.iterations;
  j["unresolved_midpoints"] = g.unresolved;
  j["rel_tol_used"] = g.rel_tol_used;
  j["checks"] = {
      {"bracket_width", tolerance_check(g.a_hi - g.a_lo, "<=", tol_a, g.a_hi - g.a_lo <= tol_a)},
      {"plateau_variation",
       tolerance_check(g.plateau_variation, "<", 0.005, g.plateau_variation < 0.005)}};
  return j;
}

selfsim_ground_state find_ground_state(const selfsim_params* P, const Common& c) {
  selfsim_ground_state g{};
  check(selfsim_find_astar(P, c.tol_a, &c.ode, &g), "find-astar");
  return g;
}

int threads_from_env() {
  const char* s = std::getenv("SELFSIM_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end || v < 1) throw Failure{SELFSIM_E_INVALID_ARGUMENT, "SELFSIM_THREADS must be a positive integer"};
  return static_cast<int>(v);
}

std::vector<double> a_grid(double lo, double hi, int n, bool log_spacing) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw Failure{SELFSIM_E_INVALID_ARGUMENT, "a-grid needs 0 < a-min <= a-max and n >= 1"};
  }
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    a[i] = log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  return a;
}

selfsim_init_kind init_kind(const std::string& s) {
  if (s == "exp_tail") return SELFSIM_INIT_EXP_TAIL;
  if (s == "separable") return SELFSIM_INIT_SEPARABLE;
  if (s == "custom") return SELFSIM_INIT_CUSTOM;
  throw Failure{SELFSIM_E_INVALID_ARGUMENT, "--init must be exp_tail, separable or custom"};
}

void read_custom(const std::string& path, std::vector<double>& r, std::vector<double>& u) {
  std::ifstream f(path);
  if (!f) throw Failure{SELFSIM_E_IO, "cannot open '" + path + "'"};
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double x = 0, y = 0;
    char comma = 0;
    if (!(ls >> x >> comma >> y) || comma != ',') {
      throw Failure{SELFSIM_E_IO, "'" + path + "': expected rows 'r,u'"};
    }
    r.push_back(x);
    u.push_back(y);
  }
}

ojson pde_summary_json(const selfsim_pde_summary& s, const selfsim_pde_options& o, double p) {
  const double target = 1.0 / (2.0 - p);
  const double dev = std::abs(s.rate_exponent / target - 1.0);
  ojson j;
  j["T_e"] = s.T_e;
  j["rate_r2"] = s.rate_r2;
  j["rate_exponent"] = s.rate_exponent;
  j["steps"] = s.steps;
  j["clamps"] = s.clamps;
  j["monotonicity_violations"] = s.monotonicity_violations;
  j["supersolution_excess"] = s.supersolution_excess;
  j["records"] = s.records;
  j["snapshots"] = s.snapshots;
  j["checks"] = {{"rate_exponent_deviation", tolerance_check(dev, "<=", 0.10, dev <= 0.10)},
                 {"rate_r2", tolerance_check(s.rate_r2, ">=", 0.999, s.rate_r2 >= 0.999)}};
  if (o.init == SELFSIM_INIT_EXP_TAIL) {
    j["checks"]["supersolution_excess"] =
        tolerance_check(s.supersolution_excess, "<=", 1e-12, s.supersolution_excess <= 1e-12);
  }
  return j;
}

ojson pde_inputs_json(const Common& c) {
  const auto& o = c.pde;
  const char* init = o.init == SELFSIM_INIT_EXP_TAIL ? "exp_tail" : o.init == SELFSIM_INIT_SEPARABLE ? "separable" : "custom";
  return {{"N", c.N},           {"p", c.p},          {"init", init},         {"kappa0", o.kappa0},
          {"T0", o.T0},         {"M", o.M},          {"R_inf", o.R_inf},     {"eps_reg", o.eps_reg},
          {"ext_tol", o.ext_tol}, {"dt_theta", o.dt_theta}, {"time_order", o.time_order}};
}

bool all_checks_pass(const ojson& j) {
  if (j.is_object()) {
    if (j.contains("pass") && j["pass"].is_boolean() && !j["pass"].get<bool>()) return false;
    for (const auto& [k, v] : j.items())
      if (!all_checks_pass(v)) return false;
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (!all_checks_pass(v)) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar extinction profiles for the fast-diffusion p-Laplacian with gradient absorption"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(selfsim_version()));

  Common c;
  selfsim_ode_options_default(&c.ode);
  selfsim_pde_options_default(&c.pde);

  auto* params_cmd = app.add_subcommand("params", "derived exponents and r_G");
  add_common(params_cmd, c, false);

  double a = 1.0;
  auto* profile_cmd = app.add_subcommand("profile", "one shooting trajectory as CSV");
  add_common(profile_cmd, c);
  profile_cmd->add_option("--a", a, "initial height f(0)")->required();

  auto* classify_cmd = app.add_subcommand("classify", "classify one shooting parameter");
  add_common(classify_cmd, c);
  classify_cmd->add_option("--a", a, "initial height f(0)")->required();

  double a_min = 0.1, a_max = 100.0;
  int a_n = 50;
  bool a_log = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "classify an a-grid in parallel (CSV)");
  add_common(sweep_cmd, c);
  sweep_cmd->add_option("--a-min", a_min, "smallest a");
  sweep_cmd->add_option("--a-max", a_max, "largest a");
  sweep_cmd->add_option("--n", a_n, "grid points");
  sweep_cmd->add_flag("--log", a_log, "logarithmic spacing");

  auto* astar_cmd = app.add_subcommand("find-astar", "bracket and bisect the ground state");
  add_common(astar_cmd, c);
  astar_cmd->add_option("--tol", c.tol_a, "target bracket width");

  double r_lo = 0.1, r_hi = 20.0;
  int r_n = 400;
  std::vector<double> j_a;
  auto* poh_cmd = app.add_subcommand("pohozaev", "coefficient, G and J tables");
  add_common(poh_cmd, c);
  poh_cmd->add_option("--r-lo", r_lo);
  poh_cmd->add_option("--r-hi", r_hi);
  poh_cmd->add_option("--n", r_n);
  poh_cmd->add_option("--a", j_a, "trajectories for J tables")->delimiter(',');

  std::string init = "exp_tail", custom_file;
  auto add_pde = [&](CLI::App* cmd) {
    add_common(cmd, c);
    cmd->add_option("--init", init, "exp_tail, separable or custom");
    cmd->add_option("--custom", custom_file, "CSV with columns r,u for custom data");
    cmd->add_option("--M", c.pde.M, "cells");
    cmd->add_option("--R", c.pde.R_inf, "outer radius");
    cmd->add_option("--T0", c.pde.T0, "separable extinction time");
    cmd->add_option("--kappa0", c.pde.kappa0, "exp_tail amplitude");
    cmd->add_option("--theta", c.pde.dt_theta, "relative change per step");
    cmd->add_option("--tol", c.tol_a, "bracket width for the ground state");
  };
  auto* run_cmd = app.add_subcommand("pde-run", "evolve to extinction, dump records and snapshots");
  add_pde(run_cmd);
  auto* cmp_cmd = app.add_subcommand("pde-compare", "evolve and compare rescaled frames with the profile");
  add_pde(cmp_cmd);

  bool quick = false;
  int only = 0;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_flag("--quick", quick, "desk-scale suite only");
  verify_cmd->add_option("--only", only, "single criterion 1..13");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd == run_cmd || cmd == cmp_cmd) {
      if (cmd->count("--init")) c.pde.init = init_kind(init);
    }
    resolve(cmd, c);

    if (cmd == verify_cmd) {
      int failures = 0;
      auto cb = [](int, int, const char* report, void*) { std::fputs(report, stdout); std::fflush(stdout); };
      check(selfsim_verify(only, quick ? 0 : 1, cb, nullptr, &failures), "verify");
      std::printf("%d criteria failed\n", failures);
      return failures ? kCheckFailed : kOk;
    }

    auto P = make_params(c);

    if (cmd == params_cmd) {
      selfsim_params_info in;
      check(selfsim_params_info_get(P.get(), &in), "params");
      ojson j = {{"schema", 1},          {"N", in.N},           {"p", in.p},
                 {"p_c", in.p_c},        {"e_flux", in.e_flux}, {"e_g", in.e_g},
                 {"e_slow", in.e_slow},  {"e_time", in.e_time}, {"e_weight", in.e_weight},
                 {"e_energy", in.e_energy}, {"r_G", in.r_G}};
      emit_summary(j, c.out);
      return kOk;
    }

    if (cmd == profile_cmd) {
      selfsim_table* t = nullptr;
      check(selfsim_profile(P.get(), a, &c.ode, &t), "profile");
      TablePtr tp(t);
      emit_table(t, c.out);
      return kOk;
    }

    if (cmd == classify_cmd) {
      selfsim_classification r;
      check(selfsim_classify(P.get(), a, &c.ode, &r), "classify");
      ojson j;
      j["schema"] = 1;
      j["inputs"] = {{"N", c.N}, {"p", c.p}, {"a", a}, {"ode", ode_json(c.ode)}};
      j["verdict"] = selfsim_verdict_name(r.verdict);
      j["R"] = r.R;
      j["slope"] = r.slope;
      j["r_bar"] = r.r_bar;
      j["r_end"] = r.r_end;
      j["h_end"] = r.h_end;
      j["g_over_f"] = r.g_over_f;
      j["J_sign"] = r.J_sign;
      emit_summary(j, c.out);
      return kOk;
    }

    if (cmd == sweep_cmd) {
      const auto grid = a_grid(a_min, a_max, a_n, a_log);
      std::vector<selfsim_classification> res(grid.size());
      check(selfsim_sweep(P.get(), grid.data(), grid.size(), &c.ode, threads_from_env(), res.data()), "sweep");
      std::ostringstream os;
      os << "a,verdict,R,slope,r_bar,r_end,h_end,g_over_f,J_sign\n";
      char buf[512];
      for (const auto& r : res) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.a,
                      selfsim_verdict_name(r.verdict), r.R, r.slope, r.r_bar, r.r_end, r.h_end, r.g_over_f,
                      r.J_sign);
        os << buf;
      }
      if (c.out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
        if (!(f << os.str())) throw Failure{SELFSIM_E_IO, "cannot write '" + c.out + "'"};
      }
      return kOk;
    }

    if (cmd == astar_cmd) {
      const auto g = find_ground_state(P.get(), c);
      ojson j;
      j["schema"] = 1;
      j["inputs"] = {{"N", c.N}, {"p", c.p}, {"tol", c.tol_a}, {"ode", ode_json(c.ode)}};
      const ojson gj = ground_state_json(g, c.tol_a);
      for (auto& [k, v] : gj.items()) j[k] = v;
      emit_summary(j, c.out);
      return all_checks_pass(j) ? kOk : kCheckFailed;
    }

    if (cmd == poh_cmd) {
      selfsim_pohozaev_info info;
      selfsim_table* t = nullptr;
      check(selfsim_pohozaev(P.get(), r_lo, r_hi, static_cast<size_t>(r_n), &info, &t), "pohozaev");
      TablePtr tp(t);
      ojson j;
      j["schema"] = 1;
      j["inputs"] = {{"N", c.N}, {"p", c.p}};
      j["M3"] = info.M3;
      j["M2"] = info.M2;
      j["M1"] = info.M1;
      j["M0"] = info.M0;
      j["r_G"] = info.r_G;
      j["degenerate"] = info.degenerate != 0;
      if (c.out.empty()) {
        emit_summary(j, "");
        return kOk;
      }
      emit_table(t, c.out + "_G.csv");
      for (double aj : j_a) {
        selfsim_table* jt = nullptr;
        check(selfsim_pohozaev_along(P.get(), aj, &c.ode, &jt), "pohozaev J");
        TablePtr jp(jt);
        char name[64];
        std::snprintf(name, sizeof name, "_J_a%.6g.csv", aj);
        emit_table(jt, c.out + name);
      }
      emit_summary(j, c.out + "_summary.json");
      return kOk;
    }

    if (cmd == run_cmd || cmd == cmp_cmd) {
      std::vector<double> cr, cu;
      if (c.pde.init == SELFSIM_INIT_CUSTOM) {
        if (custom_file.empty()) throw Failure{SELFSIM_E_INVALID_ARGUMENT, "--init custom needs --custom FILE"};
        read_custom(custom_file, cr, cu);
        c.pde.custom_r = cr.data();
        c.pde.custom_u = cu.data();
        c.pde.n_custom = cr.size();
      }
      const bool need_gs = cmd == cmp_cmd || c.pde.init == SELFSIM_INIT_SEPARABLE;
      selfsim_ground_state g{};
      if (need_gs) g = find_ground_state(P.get(), c);
      selfsim_pde_result* raw = nullptr;
      check(selfsim_pde_run(P.get(), &c.pde, need_gs ? &g : nullptr, &raw), "pde");
      PdePtr res(raw);
      selfsim_pde_summary s;
      check(selfsim_pde_summary_get(res.get(), &s), "pde summary");

      ojson j;
      j["schema"] = 1;
      j["inputs"] = pde_inputs_json(c);
      if (need_gs) j["ground_state"] = ground_state_json(g, c.tol_a);
      j["run"] = pde_summary_json(s, c.pde, c.p);
      const std::string prefix = c.out.empty() ? std::string("selfsim") : c.out;

      selfsim_table* t = nullptr;
      check(selfsim_pde_records(res.get(), &t), "records");
      TablePtr rec(t);
      emit_table(t, prefix + "_records.csv");
      for (size_t k = 0; k < s.snapshots; ++k) {
        check(selfsim_pde_snapshot(res.get(), k, &t), "snapshot");
        TablePtr sp(t);
        emit_table(t, prefix + "_snap_" + std::to_string(k) + ".csv");
      }

      if (cmd == cmp_cmd) {
        check(selfsim_pde_frames(res.get(), &t), "frames");
        TablePtr fr(t);
        emit_table(t, prefix + "_frames.csv");
        const size_t nf = selfsim_table_rows(t);
        ojson frames = ojson::array();
        double final_sup = NAN;
        for (size_t k = 0; k < nf; ++k) {
          final_sup = selfsim_table_value(t, k, 4);
          frames.push_back({{"t", selfsim_table_value(t, k, 1)}, {"sup_error", final_sup}});
        }
        bool tail_monotone = nf >= 3;
        for (size_t k = nf >= 2 ? nf - 2 : nf; tail_monotone && k < nf; ++k) {
          tail_monotone = selfsim_table_value(t, k, 4) <= selfsim_table_value(t, k - 1, 4);
        }
        for (size_t k = 0; k < s.snapshots; ++k) {
          check(selfsim_pde_rescaled(res.get(), k, &t), "rescaled");
          TablePtr rp(t);
          emit_table(t, prefix + "_rescaled_" + std::to_string(k) + ".csv");
        }
        j["frames"] = frames;
        const double rel = final_sup / g.a_star;
        j["checks"] = {{"final_sup_error_over_a_star", tolerance_check(rel, "<=", 0.05, rel <= 0.05)},
                       {"last_three_frames_nonincreasing", {{"value", tail_monotone}, {"pass", tail_monotone}}}};
      }
      emit_summary(j, prefix + "_summary.json");
      std::cout << j.dump(2) << '\n';
      return all_checks_pass(j) ? kOk : kCheckFailed;
    }
  } catch (const Failure& f) {
    std::cerr << "selfsim: " << f.message << '\n';
    return exit_for(f.status);
  } catch (const std::exception& e) {
    std::cerr << "selfsim: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

#include "selfsim/selfsim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "acceptance.hpp"
#include "error.hpp"
#include "io.hpp"
#include "pde.hpp"
#include "pohozaev.hpp"
#include "profile_ode.hpp"
#include "shooting.hpp"

#ifndef SELFSIM_VERSION
#define SELFSIM_VERSION "0.0.0"
#endif

using namespace selfsim;

struct selfsim_params {
  Params p;
};

struct selfsim_table {
  Table t;
};

struct selfsim_pde_result {
  Params params;
  PdeRun run;
  std::optional<ProfileTable> profile;
  double a_star = 0.0;
};

static_assert(static_cast<int>(ErrorCode::Internal) == SELFSIM_E_INTERNAL);
static_assert(static_cast<int>(ErrorCode::Io) == SELFSIM_E_IO);
static_assert(static_cast<int>(ErrorCode::OutOfRange) == SELFSIM_E_OUT_OF_RANGE);

namespace {

thread_local std::string g_last_error;

selfsim_status fail(selfsim_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
selfsim_status guarded(F&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SELFSIM_OK;
  } catch (const Error& e) {
    return fail(static_cast<selfsim_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SELFSIM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SELFSIM_E_INTERNAL, e.what());
  }
}

#define REQUIRE_ARG(x)                                                          \
  do {                                                                          \
    if (!(x)) return fail(SELFSIM_E_INVALID_ARGUMENT, "null argument: " #x);    \
  } while (0)

IntegratorOptions to_core(const selfsim_ode_options* o) {
  IntegratorOptions out;
  if (!o) return out;
  out.rel_tol = o->rel_tol;
  out.abs_tol = o->abs_tol;
  out.r_max = o->r_max;
  out.eps_start = o->eps_start;
  out.j_neg_threshold = o->j_neg_threshold;
  if (!(out.rel_tol > 0.0) || !(out.abs_tol > 0.0) || !(out.r_max > 0.0) || out.eps_start < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "integrator options need positive tolerances and r_max");
  }
  return out;
}

void from_core(const IntegratorOptions& o, selfsim_ode_options* out) {
  out->rel_tol = o.rel_tol;
  out->abs_tol = o.abs_tol;
  out->r_max = o.r_max;
  out->eps_start = o.eps_start;
  out->j_neg_threshold = o.j_neg_threshold;
}

void from_core(const PdeConfig& c, selfsim_pde_options* out) {
  out->kappa0 = c.kappa0;
  out->init = static_cast<selfsim_init_kind>(c.init);
  out->T0 = c.T0;
  out->eps_reg = c.eps_reg;
  out->ext_tol = c.ext_tol;
  out->R_inf = c.R_inf;
  out->M = c.M;
  out->dt_theta = c.dt_theta;
  out->time_order = c.time_order;
  out->snapshots_per_decade = c.snapshots_per_decade;
  out->max_steps = c.max_steps;
  out->custom_r = nullptr;
  out->custom_u = nullptr;
  out->n_custom = 0;
}

selfsim_classification to_c(const Classification& c) {
  selfsim_classification out{};
  out.a = c.a;
  out.verdict = static_cast<selfsim_verdict>(c.verdict);
  out.R = c.R;
  out.slope = c.slope;
  out.r_bar = c.r_bar;
  out.r_end = c.r_end;
  out.h_end = c.h_end;
  out.g_over_f = c.g_over_f;
  out.J_sign = c.J_sign;
  return out;
}

GroundStateResult to_core(const selfsim_ground_state& g) {
  GroundStateResult out;
  out.a_lo = g.a_lo;
  out.a_hi = g.a_hi;
  out.a_star = g.a_star;
  out.l_star = g.l_star;
  out.c_star = g.c_star;
  out.trust_radius = g.trust_radius;
  out.plateau_r1 = g.plateau_r1;
  out.plateau_r2 = g.plateau_r2;
  out.plateau_variation = g.plateau_variation;
  out.iterations = g.iterations;
  out.unresolved = g.unresolved;
  out.rel_tol_used = g.rel_tol_used;
  return out;
}

selfsim_table* new_table(Table t) { return new selfsim_table{std::move(t)}; }

}  // namespace

extern "C" {

const char* selfsim_version(void) { return SELFSIM_VERSION; }

const char* selfsim_status_name(selfsim_status status) {
  if (status < SELFSIM_OK || status > SELFSIM_E_INTERNAL) return "Unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* selfsim_last_error(void) { return g_last_error.c_str(); }

selfsim_status selfsim_params_create(int N, double p, selfsim_params** out) {
  REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] { *out = new selfsim_params{make_params(N, p)}; });
}

void selfsim_params_destroy(selfsim_params* params) { delete params; }

selfsim_status selfsim_params_info_get(const selfsim_params* params, selfsim_params_info* out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  return guarded([&] {
    const auto& P = params->p;
    *out = {P.N, P.p, P.p_c, P.e_flux, P.e_g, P.e_slow, P.e_time, P.e_weight, P.e_energy, 0.0};
    const auto root = find_r_G(P);
    out->r_G = root.degenerate ? 0.0 : root.r_G;
  });
}

selfsim_status selfsim_weight_rho(const selfsim_params* params, double r, double* out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  return guarded([&] { *out = weight_rho(params->p, r); });
}

void selfsim_table_destroy(selfsim_table* table) { delete table; }

size_t selfsim_table_rows(const selfsim_table* table) { return table ? table->t.rows.size() : 0; }

size_t selfsim_table_cols(const selfsim_table* table) { return table ? table->t.columns.size() : 0; }

const char* selfsim_table_column(const selfsim_table* table, size_t col) {
  if (!table || col >= table->t.columns.size()) return nullptr;
  return table->t.columns[col].c_str();
}

double selfsim_table_value(const selfsim_table* table, size_t row, size_t col) {
  if (!table || row >= table->t.rows.size() || col >= table->t.rows[row].size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return table->t.rows[row][col];
}

selfsim_status selfsim_table_write_csv(const selfsim_table* table, const char* path) {
  REQUIRE_ARG(table);
  REQUIRE_ARG(path);
  return guarded([&] { write_csv(path, table->t); });
}

selfsim_status selfsim_summary_write(const char* path, const char* json) {
  REQUIRE_ARG(path);
  REQUIRE_ARG(json);
  return guarded([&] {
    Summary s;
    try {
      s = Summary::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("summary is not valid JSON: ") + e.what());
    }
    write_summary(path, s);
  });
}

void selfsim_ode_options_default(selfsim_ode_options* out) {
  if (out) from_core(IntegratorOptions{}, out);
}

selfsim_status selfsim_profile(const selfsim_params* params, double a,
                               const selfsim_ode_options* opts, selfsim_table** out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    const auto& P = params->p;
    const auto traj = full_trajectory(P, a, to_core(opts));
    Table t;
    t.columns = {"r", "f", "g", "fprime", "E", "w", "h", "J"};
    t.rows.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
      t.rows.push_back({s.r, s.f, s.g, s.fprime, s.E, s.w, s.h, J_value(P, s.r, s.g, s.dg)});
    }
    *out = new_table(std::move(t));
  });
}

const char* selfsim_verdict_name(selfsim_verdict v) {
  if (v < SELFSIM_VERDICT_A || v > SELFSIM_VERDICT_UNRESOLVED) return "?";
  return verdict_name(static_cast<Verdict>(v));
}

selfsim_status selfsim_classify(const selfsim_params* params, double a,
                                const selfsim_ode_options* opts, selfsim_classification* out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  return guarded([&] { *out = to_c(classify(params->p, a, to_core(opts))); });
}

selfsim_status selfsim_sweep(const selfsim_params* params, const double* a, size_t n,
                             const selfsim_ode_options* opts, int threads,
                             selfsim_classification* out) {
  REQUIRE_ARG(params);
  if (n > 0) {
    REQUIRE_ARG(a);
    REQUIRE_ARG(out);
  }
  return guarded([&] {
    const auto o = to_core(opts);
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<size_t>(workers, std::max<size_t>(n, 1)));
    std::atomic<size_t> next{0};
    std::vector<std::string> errors(n);
    std::vector<ErrorCode> codes(n, ErrorCode::Ok);
    auto work = [&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          out[i] = to_c(classify(params->p, a[i], o));
        } catch (const Error& e) {
          codes[i] = e.code();
          errors[i] = e.what();
        } catch (const std::exception& e) {
          codes[i] = ErrorCode::Internal;
          errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    // report the first failure in input order, whatever finished first
    for (size_t i = 0; i < n; ++i) {
      if (codes[i] != ErrorCode::Ok) {
        throw Error(codes[i], "a = " + format_double(a[i]) + ": " + errors[i]);
      }
    }
  });
}

selfsim_status selfsim_find_astar(const selfsim_params* params, double tol_a,
                                  const selfsim_ode_options* opts, selfsim_ground_state* out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  return guarded([&] {
    const auto o = to_core(opts);
    const auto& P = params->p;
    const auto g = bisect_a_star(P, bracket_search(P, o), tol_a, o);
    *out = {g.a_lo,       g.a_hi,       g.a_star,
            g.l_star,     g.c_star,     g.trust_radius,
            g.plateau_r1, g.plateau_r2, g.plateau_variation,
            g.iterations, g.unresolved, g.rel_tol_used};
  });
}

selfsim_status selfsim_pohozaev(const selfsim_params* params, double r_lo, double r_hi, size_t n,
                                selfsim_pohozaev_info* info, selfsim_table** out) {
  REQUIRE_ARG(params);
  if (out) *out = nullptr;
  return guarded([&] {
    const auto& P = params->p;
    if (info) {
      const auto m = cubic_coeffs(P);
      const auto root = find_r_G(P);
      *info = {m.M0, m.M1, m.M2, m.M3, root.degenerate ? 0.0 : root.r_G, root.degenerate ? 1 : 0};
    }
    if (!out) return;
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || n < 2) {
      throw Error(ErrorCode::InvalidArgument, "pohozaev table needs 0 < r_lo < r_hi and n >= 2");
    }
    Table t;
    t.columns = {"r", "alpha", "beta", "gamma", "G_cubic", "G_direct"};
    for (size_t i = 0; i < n; ++i) {
      const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      const auto c = coeff_functions(P, r);
      t.rows.push_back({r, c.alpha, c.beta, c.gamma, G_cubic(P, r), G_direct(P, r)});
    }
    *out = new_table(std::move(t));
  });
}

selfsim_status selfsim_pohozaev_along(const selfsim_params* params, double a,
                                      const selfsim_ode_options* opts, selfsim_table** out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    const auto& P = params->p;
    const auto traj = full_trajectory(P, a, to_core(opts));
    Table t;
    t.columns = {"r", "J", "G", "gsq"};
    for (const auto& s : J_along(P, traj)) t.rows.push_back({s.r, s.J, s.G, s.gsq});
    *out = new_table(std::move(t));
  });
}

void selfsim_pde_options_default(selfsim_pde_options* out) {
  if (out) from_core(PdeConfig{}, out);
}

selfsim_status selfsim_pde_run(const selfsim_params* params, const selfsim_pde_options* opts,
                               const selfsim_ground_state* gs, selfsim_pde_result** out) {
  REQUIRE_ARG(params);
  REQUIRE_ARG(opts);
  REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    PdeConfig c;
    c.params = params->p;
    c.kappa0 = opts->kappa0;
    if (opts->init < SELFSIM_INIT_EXP_TAIL || opts->init > SELFSIM_INIT_CUSTOM) {
      throw Error(ErrorCode::InvalidArgument, "unknown initial data kind");
    }
    c.init = static_cast<InitKind>(opts->init);
    c.T0 = opts->T0;
    c.eps_reg = opts->eps_reg;
    c.ext_tol = opts->ext_tol;
    c.R_inf = opts->R_inf;
    c.M = opts->M;
    c.dt_theta = opts->dt_theta;
    c.time_order = opts->time_order;
    c.snapshots_per_decade = opts->snapshots_per_decade;
    c.max_steps = opts->max_steps;

    auto res = std::make_unique<selfsim_pde_result>();
    res->params = c.params;
    if (gs) {
      res->profile = ground_state_profile(c.params, to_core(*gs), IntegratorOptions{});
      res->a_star = gs->a_star;
    }
    std::vector<std::pair<double, double>> custom;
    if (c.init == InitKind::Custom) {
      if (!opts->custom_r || !opts->custom_u) {
        throw Error(ErrorCode::InvalidArgument, "custom initial data needs r and u arrays");
      }
      for (size_t i = 0; i < opts->n_custom; ++i) custom.emplace_back(opts->custom_r[i], opts->custom_u[i]);
    }
    const auto grid = RadialGrid::make(c.R_inf, c.M);
    auto field = make_initial(c, grid, res->profile ? &*res->profile : nullptr,
                              c.init == InitKind::Custom ? &custom : nullptr);
    res->run = run_to_extinction(c, grid, std::move(field));
    *out = res.release();
  });
}

void selfsim_pde_result_destroy(selfsim_pde_result* result) { delete result; }

selfsim_status selfsim_pde_summary_get(const selfsim_pde_result* result, selfsim_pde_summary* out) {
  REQUIRE_ARG(result);
  REQUIRE_ARG(out);
  const auto& r = result->run;
  *out = {r.fit.T_e,         r.fit.rate_r2,           r.rate_exponent,
          r.steps,           r.clamps,                r.monotonicity_violations,
          r.supersolution_excess, r.records.size(),   r.snapshots.size(),
          result->a_star};
  return SELFSIM_OK;
}

selfsim_status selfsim_pde_records(const selfsim_pde_result* result, selfsim_table** out) {
  REQUIRE_ARG(result);
  REQUIRE_ARG(out);
  return guarded([&] {
    Table t;
    t.columns = {"t", "umax", "I", "J", "D", "E", "balance"};
    for (const auto& r : result->run.records) t.rows.push_back({r.t, r.umax, r.I, r.J, r.D, r.E, r.balance});
    *out = new_table(std::move(t));
  });
}

selfsim_status selfsim_pde_frames(const selfsim_pde_result* result, selfsim_table** out) {
  REQUIRE_ARG(result);
  REQUIRE_ARG(out);
  *out = nullptr;
  if (!result->profile) return fail(SELFSIM_E_INVALID_ARGUMENT, "frame comparison needs a ground state");
  return guarded([&] {
    Table t;
    t.columns = {"frame", "t", "s", "vmax", "sup_error", "energy"};
    const auto frames = compare_frames(result->params, result->run, *result->profile);
    for (size_t k = 0; k < frames.size(); ++k) {
      const auto& f = frames[k];
      t.rows.push_back({static_cast<double>(k), f.t, f.s, f.vmax, f.sup_error, f.energy});
    }
    *out = new_table(std::move(t));
  });
}

selfsim_status selfsim_pde_snapshot(const selfsim_pde_result* result, size_t k, selfsim_table** out) {
  REQUIRE_ARG(result);
  REQUIRE_ARG(out);
  *out = nullptr;
  if (k >= result->run.snapshots.size()) return fail(SELFSIM_E_INVALID_ARGUMENT, "snapshot index out of range");
  return guarded([&] {
    const auto& run = result->run;
    Table t;
    t.columns = {"r", "u"};
    for (size_t i = 0; i < run.grid.r.size(); ++i) t.rows.push_back({run.grid.r[i], run.snapshots[k].u[i]});
    *out = new_table(std::move(t));
  });
}

selfsim_status selfsim_pde_rescaled(const selfsim_pde_result* result, size_t k, selfsim_table** out) {
  REQUIRE_ARG(result);
  REQUIRE_ARG(out);
  *out = nullptr;
  if (k >= result->run.snapshots.size()) return fail(SELFSIM_E_INVALID_ARGUMENT, "snapshot index out of range");
  return guarded([&] {
    const auto& run = result->run;
    const auto frame = rescale_frames(result->params, {run.snapshots[k]}, run.fit.T_e).front();
    Table t;
    t.columns = {"r", "v", "f"};
    for (size_t i = 0; i < run.grid.r.size(); ++i) {
      const double r = run.grid.r[i];
      t.rows.push_back({r, frame.v[i], result->profile ? (*result->profile)(r) : 0.0});
    }
    *out = new_table(std::move(t));
  });
}

void selfsim_config_default(selfsim_config* out) {
  if (!out) return;
  std::memset(out, 0, sizeof *out);
  RunConfig c;
  out->N = c.N;
  out->p = c.p;
  from_core(c.ode, &out->ode);
  from_core(c.pde, &out->pde);
  out->tol_a = c.tol_a;
}

selfsim_status selfsim_config_load(const char* path, selfsim_config* out) {
  REQUIRE_ARG(path);
  REQUIRE_ARG(out);
  return guarded([&] {
    const auto c = load_config(path);
    if (c.out.size() >= sizeof out->out) throw Error(ErrorCode::InvalidArgument, "config 'out' path too long");
    selfsim_config_default(out);
    out->N = c.N;
    out->p = c.p;
    from_core(c.ode, &out->ode);
    from_core(c.pde, &out->pde);
    out->tol_a = c.tol_a;
    std::memcpy(out->out, c.out.c_str(), c.out.size() + 1);
  });
}

selfsim_status selfsim_verify(int only, int extended, selfsim_verify_fn fn, void* user,
                              int* failures) {
  if (only < 0 || only > acceptance::kCriteria) {
    return fail(SELFSIM_E_INVALID_ARGUMENT, "criterion must be 1.." + std::to_string(acceptance::kCriteria));
  }
  return guarded([&] {
    acceptance::Suite suite(extended != 0);
    int bad = 0;
    for (int id = 1; id <= acceptance::kCriteria; ++id) {
      if (only && id != only) continue;
      const auto r = suite.run(id);
      if (!r.pass()) ++bad;
      if (fn) fn(id, r.pass() ? 1 : 0, acceptance::format(r).c_str(), user);
    }
    if (failures) *failures = bad;
  });
}

}  // extern "C"

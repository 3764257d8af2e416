#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "selfsim/selfsim.h"

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::strlen(selfsim_version()) > 0);
  CHECK(std::string(selfsim_status_name(SELFSIM_E_IO)) == "Io");
  CHECK(std::string(selfsim_status_name(static_cast<selfsim_status>(99))) == "Unknown");
}

TEST_CASE("parameter errors carry a status and a message") {
  selfsim_params* p = nullptr;
  CHECK(selfsim_params_create(2, 1.2, &p) == SELFSIM_E_OUT_OF_RANGE);
  CHECK(p == nullptr);
  CHECK(std::string(selfsim_last_error()).find("p_c") != std::string::npos);
  CHECK(selfsim_params_create(2, 1.5, nullptr) == SELFSIM_E_INVALID_ARGUMENT);

  REQUIRE(selfsim_params_create(2, 1.5, &p) == SELFSIM_OK);
  CHECK(std::string(selfsim_last_error()).empty());
  selfsim_params_info info;
  REQUIRE(selfsim_params_info_get(p, &info) == SELFSIM_OK);
  CHECK(info.e_time == doctest::Approx(2.0));
  CHECK(info.r_G > 1.0);
  double rho = 0;
  CHECK(selfsim_weight_rho(p, -1.0, &rho) == SELFSIM_E_DOMAIN);
  selfsim_params_destroy(p);
}

TEST_CASE("profile table") {
  selfsim_params* p = nullptr;
  REQUIRE(selfsim_params_create(2, 1.5, &p) == SELFSIM_OK);
  selfsim_ode_options o;
  selfsim_ode_options_default(&o);
  o.r_max = 5.0;
  selfsim_table* t = nullptr;
  REQUIRE(selfsim_profile(p, 1.0, &o, &t) == SELFSIM_OK);
  const char* cols[] = {"r", "f", "g", "fprime", "E", "w", "h", "J"};
  REQUIRE(selfsim_table_cols(t) == 8);
  for (size_t c = 0; c < 8; ++c) CHECK(std::string(selfsim_table_column(t, c)) == cols[c]);
  CHECK(selfsim_table_column(t, 8) == nullptr);
  CHECK(selfsim_table_value(t, 0, 1) == doctest::Approx(1.0));
  CHECK(std::isnan(selfsim_table_value(t, selfsim_table_rows(t), 0)));
  CHECK(selfsim_table_write_csv(t, "/nonexistent-dir/t.csv") == SELFSIM_E_IO);
  CHECK(std::string(selfsim_last_error()).find("/nonexistent-dir/t.csv") != std::string::npos);
  selfsim_table_destroy(t);

  o.rel_tol = -1.0;
  CHECK(selfsim_profile(p, 1.0, &o, &t) == SELFSIM_E_INVALID_ARGUMENT);
  selfsim_params_destroy(p);
}

TEST_CASE("parallel sweep preserves input order") {
  selfsim_params* p = nullptr;
  REQUIRE(selfsim_params_create(2, 1.5, &p) == SELFSIM_OK);
  std::vector<double> a = {100.0, 0.1, 7.0, 0.5, 30.0, 2.0, 1000.0, 0.01};
  std::vector<selfsim_classification> par(a.size()), seq(a.size());
  REQUIRE(selfsim_sweep(p, a.data(), a.size(), nullptr, 4, par.data()) == SELFSIM_OK);
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(selfsim_classify(p, a[i], nullptr, &seq[i]) == SELFSIM_OK);
    CHECK(par[i].a == a[i]);
    CHECK(par[i].verdict == seq[i].verdict);
    CHECK(par[i].R == seq[i].R);
    CHECK(par[i].r_bar == seq[i].r_bar);
  }
  CHECK(par[0].verdict == SELFSIM_VERDICT_A);
  CHECK(par[1].verdict == SELFSIM_VERDICT_C);
  selfsim_params_destroy(p);
}

TEST_CASE("ground state and Pohozaev tables") {
  selfsim_params* p = nullptr;
  REQUIRE(selfsim_params_create(2, 1.5, &p) == SELFSIM_OK);
  selfsim_ground_state g;
  REQUIRE(selfsim_find_astar(p, 1e-8, nullptr, &g) == SELFSIM_OK);
  CHECK(g.a_hi - g.a_lo <= 1e-8);
  CHECK(g.a_lo < g.a_star);

  selfsim_pohozaev_info info;
  selfsim_table* t = nullptr;
  REQUIRE(selfsim_pohozaev(p, 0.5, 10.0, 20, &info, &t) == SELFSIM_OK);
  CHECK(info.M3 == 7.0);
  CHECK(selfsim_table_rows(t) == 20);
  selfsim_table_destroy(t);
  CHECK(selfsim_pohozaev(p, -1.0, 10.0, 20, nullptr, &t) == SELFSIM_E_INVALID_ARGUMENT);
  selfsim_params_destroy(p);
}

TEST_CASE("pde run through the C interface") {
  selfsim_params* p = nullptr;
  REQUIRE(selfsim_params_create(2, 1.5, &p) == SELFSIM_OK);
  selfsim_pde_options o;
  selfsim_pde_options_default(&o);
  o.M = 300;
  selfsim_pde_result* r = nullptr;
  REQUIRE(selfsim_pde_run(p, &o, nullptr, &r) == SELFSIM_OK);
  selfsim_pde_summary s;
  REQUIRE(selfsim_pde_summary_get(r, &s) == SELFSIM_OK);
  CHECK(s.T_e > 0.0);
  CHECK(s.snapshots > 3);
  selfsim_table* t = nullptr;
  CHECK(selfsim_pde_frames(r, &t) == SELFSIM_E_INVALID_ARGUMENT);
  REQUIRE(selfsim_pde_snapshot(r, 0, &t) == SELFSIM_OK);
  CHECK(std::string(selfsim_table_column(t, 1)) == "u");
  CHECK(selfsim_table_rows(t) == 300);
  selfsim_table_destroy(t);
  CHECK(selfsim_pde_snapshot(r, s.snapshots, &t) == SELFSIM_E_INVALID_ARGUMENT);
  selfsim_pde_result_destroy(r);

  o.init = SELFSIM_INIT_SEPARABLE;
  CHECK(selfsim_pde_run(p, &o, nullptr, &r) == SELFSIM_E_INVALID_ARGUMENT);
  selfsim_params_destroy(p);
}

TEST_CASE("summary writer normalizes and rejects bad JSON") {
  CHECK(selfsim_summary_write("/tmp/selfsim_capi_summary.json", "{\"b\":1,\"a\":2}") == SELFSIM_OK);
  CHECK(selfsim_summary_write("/tmp/selfsim_capi_summary.json", "{oops") == SELFSIM_E_INVALID_ARGUMENT);
}

TEST_CASE("verify a single cheap criterion") {
  int failures = -1;
  int calls = 0;
  auto cb = [](int id, int pass, const char* report, void* user) {
    ++*static_cast<int*>(user);
    CHECK(id == 3);
    CHECK(pass == 1);
    CHECK(std::string(report).rfind("PASS", 0) == 0);
  };
  REQUIRE(selfsim_verify(3, 0, cb, &calls, &failures) == SELFSIM_OK);
  CHECK(calls == 1);
  CHECK(failures == 0);
  CHECK(selfsim_verify(14, 0, nullptr, nullptr, &failures) == SELFSIM_E_INVALID_ARGUMENT);
}

}

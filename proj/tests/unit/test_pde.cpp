#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "pde.hpp"

using namespace selfsim;

TEST_SUITE("pde") {

TEST_CASE("grid is cell centred") {
  const auto g = RadialGrid::make(10.0, 100);
  CHECK(g.dr == doctest::Approx(0.1));
  CHECK(g.r.front() == doctest::Approx(0.05));
  CHECK(g.r.back() == doctest::Approx(9.95));
  CHECK(g.face(0) == 0.0);
  CHECK(g.face(100) == doctest::Approx(10.0));
}

TEST_CASE("initial data kinds") {
  PdeConfig c;
  c.params = make_params(2, 1.5);
  c.kappa0 = 2.0;
  const auto g = RadialGrid::make(15.0, 300);
  const auto f = make_initial(c, g);
  CHECK(f.u[10] == doctest::Approx(2.0 * std::exp(-2.0 * g.r[10])));

  c.init = InitKind::Separable;
  CHECK_THROWS_AS(make_initial(c, g), Error);

  c.init = InitKind::Custom;
  std::vector<std::pair<double, double>> rising = {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.7}};
  try {
    make_initial(c, g, nullptr, &rising);
    FAIL("expected NonMonotoneInitialData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonMonotoneInitialData);
  }
  std::vector<std::pair<double, double>> ok = {{0.0, 1.0}, {5.0, 0.2}, {10.0, 0.0}};
  const auto fc = make_initial(c, g, nullptr, &ok);
  CHECK(fc.u[0] <= 1.0);
  CHECK(fc.u.back() == 0.0);
}

TEST_CASE("weighted functionals against closed-form integrals") {
  // N = 2, omega = 2 pi. u = 1: I = pi int_0^R r e^r dr = pi ((R-1) e^R + 1).
  // u = R - r: |D| = 1, J = (2 pi / p) int_0^R r e^r dr.
  const auto P = make_params(2, 1.5);
  const double R = 5.0;
  const auto g = RadialGrid::make(R, 4000);
  const double integral = (R - 1.0) * std::exp(R) + 1.0;
  std::vector<double> one(g.M, 1.0), ramp(g.M);
  for (int i = 0; i < g.M; ++i) ramp[i] = R - g.r[i];
  CHECK(weighted_functionals(P, g, one).I == doctest::Approx(std::numbers::pi * integral).epsilon(1e-6));
  CHECK(weighted_functionals(P, g, ramp).J == doctest::Approx(2.0 * std::numbers::pi / P.p * integral).epsilon(2e-3));
  std::vector<double> wrong(10, 1.0);
  CHECK_THROWS_AS(weighted_functionals(P, g, wrong), Error);
}

TEST_CASE("extinction fit recovers a synthetic power law") {
  const double p = 1.5, T = 0.8, c = 3.0;
  std::vector<FrameRecord> recs;
  for (int k = 0; k < 400; ++k) {
    FrameRecord r;
    r.t = T * (1.0 - std::pow(10.0, -k / 50.0));
    r.umax = std::pow(c * (T - r.t), 1.0 / (2.0 - p));
    recs.push_back(r);
  }
  const auto fit = fit_extinction(recs, p);
  CHECK(fit.T_e == doctest::Approx(T).epsilon(1e-12));
  CHECK(fit.rate_r2 == doctest::Approx(1.0));
  CHECK(fit_rate_exponent(recs, fit.T_e) == doctest::Approx(1.0 / (2.0 - p)).epsilon(1e-8));
  std::vector<FrameRecord> few(recs.begin(), recs.begin() + 10);
  CHECK_THROWS_AS(fit_extinction(few, p), Error);
}

TEST_CASE("rescaling rejects snapshots past the extinction time") {
  const auto P = make_params(2, 1.5);
  std::vector<Snapshot> s = {{0.5, {1.0}}, {1.2, {0.1}}};
  try {
    rescale_frames(P, s, 1.0);
    FAIL("expected BadExtinctionTime");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadExtinctionTime);
  }
  const auto fr = rescale_frames(P, {s[0]}, 1.0);
  CHECK(fr[0].v[0] == doctest::Approx(1.0 / std::pow(0.25, 2.0)));
  CHECK(fr[0].s == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("implicit steps keep data nonnegative, radially nonincreasing and shrinking") {
  PdeConfig c;
  c.params = make_params(3, 1.7);
  const auto g = RadialGrid::make(15.0, 400);
  auto f = make_initial(c, g);
  double prev_max = f.u[0];
  for (int n = 0; n < 50; ++n) {
    const auto info = step_implicit(c, g, f);
    CHECK(info.dt > 0.0);
    for (int i = 0; i + 1 < g.M; ++i) CHECK(f.u[i + 1] <= f.u[i] + 1e-14 * f.u[0]);
    for (double v : f.u) CHECK(v >= 0.0);
    CHECK(f.u[0] <= prev_max);
    prev_max = f.u[0];
  }
}

TEST_CASE("explicit step stays nonnegative") {
  PdeConfig c;
  c.params = make_params(2, 1.5);
  c.scheme = TimeScheme::Explicit;
  c.eps_reg = 1e-4;
  const auto g = RadialGrid::make(15.0, 200);
  auto f = make_initial(c, g);
  const auto info = step_explicit(c, g, f);
  CHECK(info.dt > 0.0);
  for (double v : f.u) CHECK(v >= 0.0);
}

TEST_CASE("coarse run from exponential data: invariants along the run") {
  PdeConfig c;
  c.params = make_params(2, 1.5);
  c.M = 400;
  const auto g = RadialGrid::make(c.R_inf, c.M);
  const auto run = run_to_extinction(c, g, make_initial(c, g));
  CHECK(run.fit.T_e > 0.0);
  CHECK(run.fit.rate_r2 > 0.999);
  CHECK(run.monotonicity_violations == 0);
  CHECK(run.supersolution_excess <= 1e-12);
  CHECK(run.rate_exponent == doctest::Approx(2.0).epsilon(0.1));
  for (std::size_t k = 1; k < run.records.size(); ++k) {
    CHECK(run.records[k].umax <= run.records[k - 1].umax);
    CHECK(run.records[k].I <= run.records[k - 1].I);
  }
  CHECK(run.snapshots.size() >= 10);
}

TEST_CASE("separable data vanish at T0") {
  const auto P = make_params(2, 1.5);
  const auto gs = bisect_a_star(P, bracket_search(P, {}), 1e-10, {});
  const auto prof = ground_state_profile(P, gs, {});
  PdeConfig c;
  c.params = P;
  c.init = InitKind::Separable;
  c.T0 = 0.5;
  c.M = 600;
  const auto g = RadialGrid::make(c.R_inf, c.M);
  const auto u0 = make_initial(c, g, &prof);
  CHECK(u0.u[0] == doctest::Approx(std::pow(0.5 * 0.5, 2.0) * gs.a_star).epsilon(1e-4));
  const auto run = run_to_extinction(c, g, u0);
  CHECK(run.fit.T_e == doctest::Approx(0.5).epsilon(0.01));
  const auto frames = compare_frames(P, run, prof);
  CHECK(frames.front().sup_error < 0.01 * gs.a_star);
}

}

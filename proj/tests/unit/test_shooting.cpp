#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "pohozaev.hpp"
#include "shooting.hpp"

using namespace selfsim;

namespace {

// Trajectory holding f on a uniform grid from a closed form, g left at 1.
Trajectory synthetic(const Params& P, double lo, double hi, int n, double (*f)(const Params&, double)) {
  Trajectory t;
  t.params = P;
  for (int i = 0; i <= n; ++i) {
    Sample s;
    s.r = lo + (hi - lo) * i / n;
    s.f = f(P, s.r);
    s.g = 1.0;
    t.samples.push_back(s);
  }
  return t;
}

double fast_form(const Params& P, double r) {
  return 3.0 * std::pow(r, -(P.N - 1.0) / (P.p - 1.0)) * std::exp(-r / (P.p - 1.0));
}

double slow_form(const Params& P, double r) {
  return std::pow((P.p - 1.0) / ((2.0 - P.p) * r), P.e_slow);
}

}  // namespace

TEST_SUITE("shooting") {

TEST_CASE("small heights decay slowly, large heights change sign") {
  const auto P = make_params(2, 1.5);
  const auto c = classify(P, 0.5, {});
  CHECK(c.verdict == Verdict::C);
  CHECK(c.r_bar > find_r_G(P).r_G);
  const auto a = classify(P, 50.0, {});
  CHECK(a.verdict == Verdict::A);
  CHECK(a.R > 0.0);
  CHECK(a.slope < 0.0);
  CHECK(std::string(verdict_name(Verdict::Unresolved)) == "Unresolved");
}

TEST_CASE("bracket endpoints carry the right verdicts") {
  for (auto [N, p] : {std::pair{2, 1.5}, std::pair{3, 1.7}}) {
    const auto P = make_params(N, p);
    const auto b = bracket_search(P, {});
    CHECK(b.a_lo < b.a_hi);
    CHECK(classify(P, b.a_lo, {}).verdict == Verdict::C);
    CHECK(classify(P, b.a_hi, {}).verdict == Verdict::A);
  }
}

TEST_CASE("bisection result is consistent and independent of the start bracket") {
  const auto P = make_params(2, 1.5);
  const double tol = 1e-9;
  const auto g1 = bisect_a_star(P, bracket_search(P, {}), tol, {});
  CHECK(g1.a_hi - g1.a_lo <= tol);
  CHECK(g1.a_lo < g1.a_star);
  CHECK(g1.a_star < g1.a_hi);
  CHECK(g1.c_star == doctest::Approx((P.p - 1.0) * std::pow(g1.l_star, P.e_g)));
  CHECK(g1.plateau_variation < 0.005);
  CHECK(g1.plateau_r1 < g1.plateau_r2);
  const auto g2 = bisect_a_star(P, {1.0, 100.0, 0}, tol, {});
  CHECK(std::abs(g2.a_star - g1.a_star) <= 10 * tol);
  CHECK_THROWS_AS(bisect_a_star(P, {100.0, 1.0, 0}, tol, {}), Error);
}

TEST_CASE("a bracket with the wrong verdicts is rejected") {
  const auto P = make_params(2, 1.5);
  try {
    bisect_a_star(P, {50.0, 100.0, 0}, 1e-8, {});
    FAIL("expected BracketFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketFailure);
  }
}

TEST_CASE("tail slopes recover closed-form decay rates") {
  const auto P = make_params(3, 1.7);
  const auto fast = synthetic(P, 5.0, 10.0, 200, fast_form);
  const auto ts = tail_slopes(P, fast, {5.0, 10.0}, {});
  CHECK(ts.slope_exp == doctest::Approx(-1.0 / (P.p - 1.0)).epsilon(1e-10));
  CHECK(ts.slope_exp_raw < ts.slope_exp);

  const auto slow = synthetic(P, 100.0, 1000.0, 400, slow_form);
  const auto ta = tail_slopes(P, slow, {}, {100.0, 1000.0});
  CHECK(ta.slope_alg == doctest::Approx(-P.e_slow).epsilon(1e-10));
  CHECK(ta.prefactor == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(tail_slopes(P, fast, {5.0, 5.1}, {}), Error);
}

TEST_CASE("plateau detection on a synthetic weighted flux") {
  const auto P = make_params(2, 1.5);
  Trajectory t;
  t.params = P;
  for (int i = 1; i <= 400; ++i) {
    Sample s;
    s.r = 0.05 * i;
    // rho g equals 4 on [5, 15] and drifts elsewhere
    const double w = s.r < 5.0 ? 4.0 * s.r / 5.0 : s.r > 15.0 ? 4.0 + (s.r - 15.0) : 4.0;
    s.g = w / weight_rho(P, s.r);
    t.samples.push_back(s);
  }
  const auto pl = estimate_l(P, t);
  CHECK(pl.l == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(pl.r1 <= 5.0);
  CHECK(pl.r2 >= 15.0);
  PlateauOptions strict;
  strict.min_length = 50.0;
  CHECK_THROWS_AS(estimate_l(P, t, strict), Error);
}

TEST_CASE("trust radius of a trajectory with itself is its full range") {
  const auto P = make_params(2, 1.5);
  IntegratorOptions o;
  o.r_max = 10.0;
  const auto t = full_trajectory(P, 0.3, o);
  CHECK(trust_radius(t, t) == doctest::Approx(t.r_end()));
}

TEST_CASE("tail integral: two independent routes agree and the ratio tends to 1") {
  for (auto [N, p] : {std::pair{2, 1.5}, std::pair{3, 1.7}}) {
    const auto P = make_params(N, p);
    const auto ti = tail_integral_check(P, {5.0, 10.0, 20.0, 40.0, 80.0});
    CHECK(ti.max_route_gap < 1e-8);
    for (std::size_t i = 1; i < ti.r.size(); ++i) {
      CHECK(std::abs(ti.ratio[i] - 1.0) < std::abs(ti.ratio[i - 1] - 1.0));
    }
    // the leading correction is (N-1)/r
    CHECK(std::abs(ti.ratio.back() - 1.0) * 80.0 == doctest::Approx(N - 1.0).epsilon(0.05));
  }
}

TEST_CASE("large-a and small-a limits are approached monotonically") {
  const auto P = make_params(2, 1.5);
  const auto psi = psi_integrate(P, {});
  double prev = INFINITY;
  for (double a : {10.0, 100.0, 1000.0}) {
    const double d = large_a_distance(P, a, psi, {});
    CHECK(d < prev);
    prev = d;
  }
  prev = INFINITY;
  for (double a : {1e-1, 1e-2, 1e-3}) {
    const double d = small_a_distance(P, a, 10.0, {});
    CHECK(d < prev);
    prev = d;
  }
}

}

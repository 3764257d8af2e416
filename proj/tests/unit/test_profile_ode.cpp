#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "params.hpp"
#include "profile_ode.hpp"

using namespace selfsim;

namespace {

// Fixed-step classical RK4 on (f, g), independent of the adaptive integrator.
ProfileState rk4(const Params& P, ProfileState y, double r_end, double h, OdeSystem sys) {
  auto F = [&](double r, double f, double g) { return rhs(P, {r, f, g}, sys); };
  while (y.r < r_end) {
    const double s = std::min(h, r_end - y.r);
    const auto k1 = F(y.r, y.f, y.g);
    const auto k2 = F(y.r + s / 2, y.f + s / 2 * k1.df, y.g + s / 2 * k1.dg);
    const auto k3 = F(y.r + s / 2, y.f + s / 2 * k2.df, y.g + s / 2 * k2.dg);
    const auto k4 = F(y.r + s, y.f + s * k3.df, y.g + s * k3.dg);
    y.f += s / 6 * (k1.df + 2 * k2.df + 2 * k3.df + k4.df);
    y.g += s / 6 * (k1.dg + 2 * k2.dg + 2 * k3.dg + k4.dg);
    y.r += s;
  }
  return y;
}

}  // namespace

TEST_SUITE("profile_ode") {

TEST_CASE("start radius rule") {
  CHECK(default_eps_start(0.5) == doctest::Approx(1e-6));
  CHECK(default_eps_start(100.0) == doctest::Approx(1e-8));
  CHECK(default_eps_start(10.0) == doctest::Approx(1e-7));
}

TEST_CASE("series start satisfies the equations to leading order") {
  const auto P = make_params(2, 1.5);
  const double a = 2.0, eps = 1e-4;
  const auto s = series_start(P, a, eps);
  CHECK(s.g == doctest::Approx(a * eps / 2).epsilon(1e-4));
  CHECK(s.f < a);
  // g' = f - g - (N-1) g / r is a/N at r -> 0
  const auto d = rhs(P, s);
  CHECK(d.dg == doctest::Approx(a / 2).epsilon(1e-3));
}

TEST_CASE("adaptive integration matches a fine fixed-step oracle") {
  for (auto [N, p, a] : {std::tuple{2, 1.5, 1.0}, std::tuple{3, 1.7, 0.3}, std::tuple{2, 1.5, 20.0}}) {
    const auto P = make_params(N, p);
    IntegratorOptions o;
    o.r_max = 3.0;
    o.continue_past_fzero = true;
    const auto traj = integrate(P, a, o);
    const double r_hi = std::min(3.0, traj.r_end());
    const double eps = traj.samples.front().r;
    const auto ref = rk4(P, series_start(P, a, eps), r_hi, 2e-5, OdeSystem::Profile);
    CAPTURE(N);
    CAPTURE(a);
    CHECK(traj.f_at(r_hi) == doctest::Approx(ref.f).epsilon(1e-7).scale(a));
    CHECK(traj.g_at(r_hi) == doctest::Approx(ref.g).epsilon(1e-7).scale(a));
  }
}

TEST_CASE("bounds and energy decay hold for random shooting heights") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> loga(std::log(1e-3), std::log(1e3));
  for (auto [N, p] : {std::pair{2, 1.5}, std::pair{3, 1.7}, std::pair{1, 1.3}}) {
    const auto P = make_params(N, p);
    for (int k = 0; k < 12; ++k) {
      const double a = std::exp(loga(rng));
      IntegratorOptions o;
      o.r_max = 30.0;
      const auto traj = integrate(P, a, o);
      for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        if (s.f > 0.0) {
          CHECK(s.f <= a);
          CHECK(s.g > 0.0);
          CHECK(s.fprime < 0.0);
          CHECK(s.fprime > -std::pow(a / N * s.r, P.e_g));
        }
        if (i > 0) CHECK(s.E <= traj.samples[i - 1].E + 1e-12 * traj.samples.front().E);
      }
    }
  }
}

TEST_CASE("f-zero event is located on the continuous extension") {
  const auto P = make_params(2, 1.5);
  const auto traj = integrate(P, 100.0, {});
  const auto* ev = traj.find_event(EventKind::FZero);
  REQUIRE(ev != nullptr);
  CHECK(std::abs(ev->f) < 1e-9);
  CHECK(ev->fprime < 0.0);
  CHECK(traj.samples.back().r == doctest::Approx(ev->r));
}

TEST_CASE("small heights are truncated at the horizon") {
  const auto P = make_params(2, 1.5);
  IntegratorOptions o;
  o.r_max = 25.0;
  const auto traj = integrate(P, 0.1, o);
  CHECK(traj.has_event(EventKind::Truncated));
  CHECK(traj.r_end() == doctest::Approx(25.0));
  CHECK(traj.samples.back().f > 0.0);
}

TEST_CASE("w and h annotations") {
  const auto P = make_params(3, 1.7);
  auto traj = integrate(P, 1.0, {});
  for (const auto& s : traj.samples) {
    CHECK(s.w == doctest::Approx(weight_rho(P, s.r) * s.g).epsilon(1e-12));
    CHECK(s.h == doctest::Approx(s.f / s.g).epsilon(1e-12));
  }
  CHECK(annotate_w_h(traj) == 0);
}

TEST_CASE("step budget exhaustion is a StepSizeUnderflow") {
  const auto P = make_params(2, 1.5);
  IntegratorOptions o;
  o.max_steps = 5;
  try {
    integrate(P, 1.0, o);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepSizeUnderflow);
  }
}

TEST_CASE("observer can stop the integration") {
  const auto P = make_params(2, 1.5);
  const auto traj = integrate(P, 1.0, {}, [](Trajectory&, const Sample& s) { return s.r < 2.0; });
  CHECK(traj.r_end() >= 2.0);
  CHECK(traj.r_end() < 2.1);
}

TEST_CASE("psi: one-dimensional energy conservation fixes the slope at s0") {
  // Without absorption and with N = 1, (p-1)/p |psi'|^p + psi^2/2 = 1/2.
  for (double p : {1.3, 1.5, 1.8}) {
    const auto P = make_params(1, p);
    const auto psi = psi_integrate(P, {});
    const auto* z = psi.find_event(EventKind::FZero);
    REQUIRE(z != nullptr);
    CHECK(z->fprime == doctest::Approx(-std::pow(p / (2.0 * (p - 1.0)), 1.0 / p)).epsilon(1e-8));
  }
}

TEST_CASE("psi zero agrees with the fixed-step oracle") {
  const auto P = make_params(2, 1.5);
  const auto psi = psi_integrate(P, {});
  const double s0 = psi.r_end();
  const double eps = psi.samples.front().r;
  const auto y = rk4(P, series_start(P, 1.0, eps, OdeSystem::AbsorptionFree), s0, 2e-5, OdeSystem::AbsorptionFree);
  CHECK(std::abs(y.f) < 1e-8);
}

}

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "error.hpp"
#include "numerics.hpp"

using namespace selfsim;

TEST_SUITE("numerics") {

TEST_CASE("Fornberg weights reproduce the textbook 5-point stencil") {
  const std::vector<double> x = {-2, -1, 0, 1, 2};
  const auto w = num::fornberg_weights(0.0, x, 1);
  const double expect[] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  const auto w2 = num::fornberg_weights(0.0, x, 2);
  const double expect2[] = {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w2[i] == doctest::Approx(expect2[i]).epsilon(1e-13));
}

TEST_CASE("stencil derivative is exact for degree-6 polynomials on irregular nodes") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  std::vector<double> x, y;
  double r = 0.0;
  for (int i = 0; i < 30; ++i) {
    r += 0.1 + jitter(rng);
    x.push_back(r);
    y.push_back(std::pow(r, 6) - 3 * r * r + 1);
  }
  const auto d = num::stencil_derivative(x, y, 7);
  CHECK(std::isnan(d[0]));
  CHECK(std::isnan(d[29]));
  for (int i = 3; i < 27; ++i) CHECK(d[i] == doctest::Approx(6 * std::pow(x[i], 5) - 6 * x[i]).epsilon(1e-8));
}

TEST_CASE("line fit") {
  std::vector<double> x = {0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.5 - 0.75 * v);
  const auto f = num::fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-0.75));
  CHECK(f.intercept == doctest::Approx(2.5));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.n == 5);
}

TEST_CASE("Hermite interpolation is exact for cubics") {
  std::vector<double> x = {0.0, 0.3, 1.1, 2.0}, y, dy;
  for (double v : x) {
    y.push_back(v * v * v - v);
    dy.push_back(3 * v * v - 1);
  }
  for (double q : {0.05, 0.7, 1.9}) CHECK(num::hermite_interp(x, y, dy, q) == doctest::Approx(q * q * q - q));
  CHECK_THROWS_AS(num::hermite_interp(x, y, dy, 2.5), Error);
}

TEST_CASE("monotone cubic stays monotone on step-like data") {
  num::MonotoneCubic m({0, 1, 2, 3, 4}, {1, 1, 0.9, 0.1, 0});
  double prev = m(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double v = m(i * 0.01);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("cumulative trapezoid") {
  std::vector<double> x = {0, 1, 2, 3}, y = {0, 2, 4, 6};
  const auto c = num::cumulative_trapezoid(x, y);
  CHECK(c[0] == 0.0);
  CHECK(c[3] == doctest::Approx(9.0));
}

TEST_CASE("tridiagonal solve against a dense product") {
  const int n = 6;
  std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.5), x(n), b(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(i + 1.0);
  for (int i = 0; i < n; ++i) {
    b[i] = di[i] * x[i];
    if (i > 0) b[i] += lo[i] * x[i - 1];
    if (i + 1 < n) b[i] += up[i] * x[i + 1];
  }
  num::solve_tridiagonal(lo, di, up, b);
  for (int i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

TEST_CASE("bisection") {
  const double r = num::bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

}

#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "params.hpp"

using namespace selfsim;

TEST_SUITE("params") {

TEST_CASE("derived exponents at the default point") {
  const auto P = make_params(2, 1.5);
  CHECK(P.p_c == doctest::Approx(4.0 / 3.0));
  CHECK(P.e_flux == doctest::Approx(1.0));
  CHECK(P.e_g == doctest::Approx(2.0));
  CHECK(P.e_slow == doctest::Approx(1.0));
  CHECK(P.e_time == doctest::Approx(2.0));
  CHECK(P.e_weight == doctest::Approx(1.2));
  CHECK(P.e_energy == doctest::Approx(3.0));
}

TEST_CASE("exponents obey their defining relations for several points") {
  for (int N : {1, 2, 3, 5}) {
    for (double t : {0.1, 0.5, 0.9}) {
      const double pc = 2.0 * N / (N + 1.0);
      const double p = pc + t * (2.0 - pc);
      const auto P = make_params(N, p);
      CHECK(P.e_flux * (p - 1.0) == doctest::Approx(2.0 - p));
      CHECK(P.e_slow == doctest::Approx((p - 1.0) * P.e_time));
      CHECK(P.e_energy == doctest::Approx(p * P.e_g));
      CHECK(P.e_weight * (3.0 * p - 2.0) == doctest::Approx(2.0 * p));
    }
  }
}

TEST_CASE("range checks") {
  CHECK_THROWS_AS(make_params(0, 1.5), Error);
  CHECK_THROWS_AS(make_params(2, 2.0), Error);
  CHECK_THROWS_AS(make_params(2, 4.0 / 3.0), Error);
  CHECK_THROWS_AS(make_params(2, NAN), Error);
  try {
    make_params(2, 1.2);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
    CHECK(std::string(e.what()).find("p_c") != std::string::npos);
  }
  CHECK_NOTHROW(make_params(1, 1.01));
}

TEST_CASE("weight") {
  const auto P = make_params(3, 1.7);
  CHECK(weight_rho(P, 2.0) == doctest::Approx(4.0 * std::exp(2.0)));
  CHECK(log_rho(P, 800.0) == doctest::Approx(2.0 * std::log(800.0) + 800.0));
  CHECK(std::isfinite(log_rho(P, 800.0)));
  CHECK_THROWS_AS(weight_rho(P, 0.0), Error);
  CHECK_THROWS_AS(log_rho(P, -1.0), Error);
  CHECK(rho_log_derivative(P, 4.0) == doctest::Approx(1.5));
}

TEST_CASE("error code names") {
  CHECK(std::string(error_code_name(ErrorCode::StepSizeUnderflow)) == "StepSizeUnderflow");
  CHECK(std::string(error_code_name(ErrorCode::Io)) == "Io");
}

}

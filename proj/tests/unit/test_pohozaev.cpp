#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "numerics.hpp"
#include "pohozaev.hpp"
#include "shooting.hpp"

using namespace selfsim;

TEST_SUITE("pohozaev") {

TEST_CASE("cubic coefficients at (2, 1.5)") {
  const auto m = cubic_coeffs(make_params(2, 1.5));
  CHECK(m.M3 == 7.0);
  CHECK(m.M2 == -0.25);
  CHECK(m.M1 == -1.5);
  CHECK(m.M0 == -0.5);
}

TEST_CASE("leading coefficient at the critical exponent") {
  for (int N = 2; N <= 6; ++N) {
    const double pc = 2.0 * N / (N + 1.0);
    CHECK(cubic_coeffs(N, pc).M3 == doctest::Approx(4.0 * N * N * N / ((N + 1.0) * (N + 1.0))).epsilon(1e-13));
  }
}

TEST_CASE("ratio form is consistent with the raw coefficients") {
  const auto P = make_params(3, 1.7);
  for (double r : {0.3, 2.0, 15.0}) {
    const auto c = coeff_functions(P, r);
    const auto q = coeff_ratios(P, r);
    CHECK(c.alpha == doctest::Approx(std::pow(weight_rho(P, r), P.e_weight)));
    CHECK(c.delta == doctest::Approx(c.alpha));
    CHECK(q.beta * c.alpha == doctest::Approx(c.beta));
    CHECK(q.gamma * c.alpha == doctest::Approx(c.gamma));
  }
  CHECK_THROWS_AS(coeff_functions(P, 0.0), Error);
}

TEST_CASE("G from the cubic matches G from differentiated coefficients") {
  for (auto [N, p] : {std::pair{2, 1.5}, std::pair{3, 1.7}, std::pair{4, 1.9}}) {
    const auto P = make_params(N, p);
    for (double r = 0.1; r < 20.0; r += 0.37) {
      const double Gc = G_cubic(P, r);
      CHECK(std::abs(G_direct(P, r) - Gc) / (std::abs(Gc) + 1.0) < 1e-6);
    }
  }
}

TEST_CASE("r_G is where the directly computed G changes sign") {
  for (auto [N, p] : {std::pair{2, 1.5}, std::pair{3, 1.7}}) {
    const auto P = make_params(N, p);
    const auto root = find_r_G(P);
    REQUIRE_FALSE(root.degenerate);
    CHECK(G_direct(P, 0.99 * root.r_G) > 0.0);
    CHECK(G_direct(P, 1.01 * root.r_G) < 0.0);
    const double flip = num::bisect_root([&](double r) { return G_direct(P, r); }, 0.5 * root.r_G, 2.0 * root.r_G, 1e-13);
    CHECK(root.r_G == doctest::Approx(flip).epsilon(1e-8));
    CHECK(std::abs(cubic_P(P, cubic_coeffs(P), root.z)) < 1e-12);
  }
  CHECK(find_r_G(make_params(1, 1.5)).degenerate);
}

TEST_CASE("J' = G g^2 along a trajectory") {
  const auto P = make_params(2, 1.5);
  IntegratorOptions o;
  o.r_max = 8.0;
  const auto traj = full_trajectory(P, 1.0, o);
  CHECK(J_identity_residual(P, traj, 0.1, 7.5) < 1e-5);
}

TEST_CASE("J bracket and value agree where both are finite") {
  const auto P = make_params(2, 1.5);
  const double r = 3.0, g = 0.2, dg = -0.05;
  const double alpha = coeff_functions(P, r).alpha;
  CHECK(J_value(P, r, g, dg) == doctest::Approx(alpha * g * g * J_bracket(P, r, g, dg)));
}

TEST_CASE("Wronskian identity on a pair of trajectories") {
  const auto P = make_params(2, 1.5);
  IntegratorOptions o;
  o.r_max = 4.5;
  const auto t1 = full_trajectory(P, 0.5, o);
  const auto t2 = full_trajectory(P, 1.0, o);
  const auto w = wronskian_check(P, t1, t2, 4.0);
  CHECK(w.max_residual < 1e-5);
  CHECK(w.points > 1000);
  const auto xs = comparison_X(P, t1, t2, 4.0);
  CHECK(xs.front().q == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("z0 against closed forms") {
  // N = 2: 1 - 1/r + e^{-r}/r;  N = 3: (r^2 - 2r + 2 - 2 e^{-r}) / r^2
  const auto P2 = make_params(2, 1.5);
  const auto P3 = make_params(3, 1.7);
  const std::vector<double> rs = {0.01, 0.5, 3.0, 12.0, 40.0};
  const auto z2 = small_a_limit_z0(P2, rs);
  const auto z3 = small_a_limit_z0(P3, rs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    CHECK(z2[i].z0 == doctest::Approx(1.0 + std::expm1(-r) / r).epsilon(1e-10));
    CHECK(z3[i].z0 == doctest::Approx((r * r - 2 * r - 2 * std::expm1(-r)) / (r * r)).epsilon(1e-9));
  }
}

}

#include "pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "numerics.hpp"

namespace selfsim {

Coeffs coeff_ratios(const Params& params, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::Domain, "Pohozaev coefficients require r > 0");
  const double p = params.p;
  const double n1 = params.N - 1.0;
  const double q = 3.0 * p - 2.0;
  const double q2 = q * q;
  const double pp = (p - 1.0) * (2.0 - p);
  Coeffs c;
  c.alpha = 1.0;
  c.delta = 1.0;
  c.beta = 2.0 * (p - 1.0) / q * (1.0 + n1 / r);
  c.gamma = -(2.0 * pp / q2 + 4.0 * n1 * pp / (q2 * r) +
              n1 / q2 * (p * q + 2.0 * n1 * pp) / (r * r));
  return c;
}

Coeffs coeff_functions(const Params& params, double r) {
  Coeffs c = coeff_ratios(params, r);
  const double alpha = std::exp(params.e_weight * log_rho(params, r));
  c.alpha = alpha;
  c.delta = alpha;
  c.beta *= alpha;
  c.gamma *= alpha;
  return c;
}

CubicCoeffs cubic_coeffs(const Params& params) { return cubic_coeffs(params.N, params.p); }

CubicCoeffs cubic_coeffs(int N, double p) {
  const double n1 = N - 1.0;
  const double q = 3.0 * p - 2.0;
  const double pp = (p - 1.0) * (2.0 - p);
  CubicCoeffs m;
  m.M3 = q * q + n1 * q * (3.0 * p - 4.0) - 2.0 * pp * n1 * n1;
  m.M2 = q * (3.0 * p - 4.0) - 6.0 * n1 * pp;
  m.M1 = -6.0 * pp;
  m.M0 = -2.0 * pp;
  return m;
}

double cubic_P(const Params& params, const CubicCoeffs& m, double z) {
  return (params.N - 1.0) * (((m.M3 * z + m.M2) * z + m.M1) * z) + m.M0;
}

RootG find_r_G(const Params& params) {
  const auto m = cubic_coeffs(params);
  RootG out;
  if (params.N == 1) {
    out.degenerate = true;
    return out;
  }
  constexpr double z_max = 1e3;
  auto P = [&](double z) { return cubic_P(params, m, z); };
  if (!(P(0.0) < 0.0) || !(P(z_max) > 0.0)) {
    throw Error(ErrorCode::RootBracketFailure, "find_r_G: no sign change of P on (0, 1e3]");
  }
  double z = num::bisect_root(P, 0.0, z_max, 1e-13);
  const double n1 = params.N - 1.0;
  for (int it = 0; it < 4; ++it) {
    const double dP = n1 * ((3.0 * m.M3 * z + 2.0 * m.M2) * z + m.M1);
    if (dP == 0.0) break;
    z -= P(z) / dP;
  }
  out.z = z;
  out.r_G = 1.0 / z;
  return out;
}

double G_cubic(const Params& params, double r) {
  const auto c = coeff_functions(params, r);
  const double q = 3.0 * params.p - 2.0;
  return params.p / (q * q * q) * c.alpha * cubic_P(params, cubic_coeffs(params), 1.0 / r);
}

double G_direct(const Params& params, double r) {
  const double h = 1e-5 * r;
  const double gp = (coeff_functions(params, r + h).gamma - coeff_functions(params, r - h).gamma) /
                    (2.0 * h);
  const double beta = coeff_functions(params, r).beta;
  return (params.N - 1.0) * beta / (r * r) + 0.5 * gp;
}

double J_bracket(const Params& params, double r, double g, double dg) {
  const auto c = coeff_ratios(params, r);
  const double t = dg / g;
  return 0.5 * t * t + c.beta * t + 0.5 * c.gamma +
         (params.p - 1.0) / params.p * std::pow(g, params.e_flux);
}

double J_value(const Params& params, double r, double g, double dg) {
  if (g > 0.0) {
    const double la = params.e_weight * log_rho(params, r);
    return std::exp(la + 2.0 * std::log(g)) * J_bracket(params, r, g, dg);
  }
  const auto c = coeff_functions(params, r);
  return 0.5 * c.alpha * dg * dg + c.beta * g * dg + 0.5 * c.gamma * g * g +
         (params.p - 1.0) / params.p * c.delta * std::pow(std::abs(g), params.e_energy);
}

std::vector<JSample> J_along(const Params& params, const Trajectory& traj) {
  std::vector<JSample> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.push_back({s.r, J_value(params, s.r, s.g, s.dg), G_cubic(params, s.r), s.g * s.g});
  }
  return out;
}

double J_identity_residual(const Params& params, const Trajectory& traj, double lo, double hi) {
  const auto js = J_along(params, traj);
  std::vector<double> r(js.size()), J(js.size());
  for (std::size_t i = 0; i < js.size(); ++i) {
    r[i] = js[i].r;
    J[i] = js[i].J;
  }
  const auto dJ = num::stencil_derivative(r, J, 7);
  double worst = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    if (r[i] < lo || r[i] > hi || !std::isfinite(dJ[i])) continue;
    const auto& s = traj.samples[i];
    const double scale = coeff_functions(params, s.r).alpha * (s.g * s.g + s.dg * s.dg);
    worst = std::max(worst, std::abs(dJ[i] - js[i].G * js[i].gsq) / scale);
  }
  return worst;
}

WronskianResult wronskian_check(const Params& params, const Trajectory& t1, const Trajectory& t2,
                                double r_hi, double h) {
  const double r0 = std::max(t1.samples.front().r, t2.samples.front().r);
  const double r1 = std::min({r_hi, t1.r_end(), t2.r_end()});
  if (!(r1 > r0) || !(h > 0.0)) {
    throw Error(ErrorCode::GridMismatch, "wronskian_check: trajectories share no common range");
  }
  const auto n = static_cast<std::size_t>(std::ceil((r1 - r0) / h));
  const double k = params.e_flux;
  const double dr = (r1 - r0) / static_cast<double>(n);

  WronskianResult res;
  res.points = n + 1;
  // running value of rho * Q, and the previous integrand for the trapezoid
  double rhoQ = 0.0, prev = 0.0;
  std::vector<double> W(n + 1), Q(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = i == n ? r1 : r0 + dr * static_cast<double>(i);
    const auto s1 = t1.state_at(r);
    const auto s2 = t2.state_at(r);
    if (!(s1.g > 0.0) || !(s2.g > 0.0)) {
      throw Error(ErrorCode::GridMismatch, "wronskian_check: g is not positive on the window");
    }
    const double d1 = rhs(params, s1, t1.system).dg;
    const double d2 = rhs(params, s2, t2.system).dg;
    const double rho = weight_rho(params, r);
    W[i] = d1 * s2.g - s1.g * d2;
    const double integrand = rho * (std::pow(s2.g, k) - std::pow(s1.g, k)) * s1.g * s2.g;
    if (i == 0) {
      rhoQ = rho * W[0];  // exact value carried in from the series region
    } else {
      rhoQ += 0.5 * dr * (prev + integrand);
    }
    prev = integrand;
    Q[i] = rhoQ / rho;
  }
  res.W0 = W[0];
  double max_diff = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    res.max_W = std::max(res.max_W, std::abs(W[i]));
    max_diff = std::max(max_diff, std::abs(W[i] - Q[i]));
  }
  res.max_residual = res.max_W > 0.0 ? max_diff / res.max_W : max_diff;
  return res;
}

std::vector<XSample> comparison_X(const Params& params, const Trajectory& t1,
                                  const Trajectory& t2, double r_hi, std::size_t* flagged) {
  const double r0 = std::max(t1.samples.front().r, t2.samples.front().r);
  const double r1 = std::min({r_hi, t1.r_end(), t2.r_end()});
  std::vector<double> grid;
  for (const auto* t : {&t1, &t2}) {
    for (const auto& s : t->samples) {
      if (s.r >= r0 && s.r <= r1) grid.push_back(s.r);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::size_t bad = 0;
  std::vector<XSample> out;
  out.reserve(grid.size());
  for (double r : grid) {
    const auto s1 = t1.state_at(r);
    const auto s2 = t2.state_at(r);
    if (!(s1.g > 0.0)) {
      ++bad;
      continue;
    }
    const double J1 = J_value(params, r, s1.g, rhs(params, s1, t1.system).dg);
    const double J2 = J_value(params, r, s2.g, rhs(params, s2, t2.system).dg);
    const double q = s2.g / s1.g;
    out.push_back({r, q, q * q * J1 - J2});
  }
  if (flagged) *flagged = bad;
  return out;
}

std::vector<Z0Sample> small_a_limit_z0(const Params& params, const std::vector<double>& r_grid) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<Z0Sample> out;
  out.reserve(r_grid.size());
  const int n1 = params.N - 1;
  double prev = 0.0;
  for (double r : r_grid) {
    if (!(r > prev)) {
      throw Error(ErrorCode::InvalidArgument, "small_a_limit_z0: grid must be positive increasing");
    }
    prev = r;
    // (1/rho(r)) int_0^r rho(s) ds with t = r - s: int_0^r (1 - t/r)^{N-1} e^{-t} dt
    auto integrand = [&](double t) { return std::pow(1.0 - t / r, n1) * std::exp(-t); };
    double err = 0.0;
    const double z0 = gauss_kronrod<double, 31>::integrate(integrand, 0.0, r, 15, 1e-14, &err);
    const double dz0 = 1.0 - (1.0 + n1 / r) * z0;
    const auto c = coeff_functions(params, r);
    const double Z0 = 0.5 * c.alpha * dz0 * dz0 + c.beta * dz0 * z0 + 0.5 * c.gamma * z0 * z0;
    out.push_back({r, z0, Z0});
  }
  return out;
}

}  // namespace selfsim

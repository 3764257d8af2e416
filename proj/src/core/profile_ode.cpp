#include "profile_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "numerics.hpp"

namespace selfsim {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

using Vec = std::array<double, 2>;

struct Dense {
  double r0 = 0.0, h = 0.0;
  std::array<Vec, 5> rc{};

  Vec at(double r) const {
    const double th = (r - r0) / h;
    const double th1 = 1.0 - th;
    Vec y;
    for (int i = 0; i < 2; ++i) {
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }
    return y;
  }
};

Vec eval(const Params& params, double r, const Vec& y, OdeSystem system) {
  const auto d = rhs(params, {r, y[0], y[1]}, system);
  return {d.df, d.dg};
}

Sample make_sample(const Params& params, double r, double f, double g, OdeSystem system) {
  Sample s;
  s.r = r;
  s.f = f;
  s.g = g;
  const auto d = rhs(params, {r, f, g}, system);
  s.fprime = d.df;
  s.dg = d.dg;
  s.E = energy(params, {r, f, g});
  if (g > 0.0) {
    s.w = std::exp(log_rho(params, r) + std::log(g));
    s.h = f / g;
  } else {
    s.w = weight_rho(params, r) * g;
    s.h = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

// Root of component `comp` of the dense output on [lo, hi], which brackets a
// sign change. Bisected down to rounding: the event becomes a sample, and
// anything looser shows up in finite differences over the tiny last steps.
double locate_root(const Dense& dense, int comp, double lo, double hi) {
  double vlo = dense.at(lo)[comp];
  const double stop = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi);
  for (int it = 0; it < 200 && hi - lo > stop; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double vm = dense.at(mid)[comp];
    if (vm == 0.0) return mid;
    if ((vm > 0) == (vlo > 0)) {
      lo = mid;
      vlo = vm;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::FZero: return "FZero";
    case EventKind::GZero: return "GZero";
    case EventKind::JNegative: return "JNegative";
    case EventKind::Truncated: return "Truncated";
  }
  return "?";
}

ProfileDerivs rhs(const Params& params, const ProfileState& s, OdeSystem system) {
  const double ag = std::abs(s.g);
  ProfileDerivs d;
  d.df = -std::pow(ag, params.e_flux) * s.g;
  d.dg = s.f - (params.N - 1) * s.g / s.r;
  if (system == OdeSystem::Profile) d.dg -= ag;
  return d;
}

double default_eps_start(double a) { return std::max(1e-8, 1e-6 / std::max(1.0, a)); }

ProfileState series_start(const Params& params, double a, double eps, OdeSystem system) {
  const double N = params.N;
  ProfileState s;
  s.r = eps;
  // g = (a/N) r - a r^2 / (N(N+1)) + ...; the quadratic term comes from the
  // absorption |g| and is absent in the absorption-free problem.
  s.g = a * eps / N;
  if (system == OdeSystem::Profile) s.g -= a * eps * eps / (N * (N + 1.0));
  s.f = a - (params.p - 1.0) / params.p * std::pow(a / N, params.e_g) *
                std::pow(eps, params.e_energy);
  return s;
}

double energy(const Params& params, const ProfileState& s) {
  return (params.p - 1.0) / params.p * std::pow(std::abs(s.g), params.e_energy) +
         0.5 * s.f * s.f;
}

const Event* Trajectory::find_event(EventKind kind) const {
  for (const auto& e : events) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

std::vector<double> Trajectory::column(double Sample::*member) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.*member);
  return out;
}

std::vector<Sample> Trajectory::window(double lo, double hi) const {
  std::vector<Sample> out;
  for (const auto& s : samples) {
    if (s.r >= lo && s.r <= hi) out.push_back(s);
  }
  return out;
}

double Trajectory::f_at(double r) const {
  if (samples.empty() || r < samples.front().r || r > samples.back().r) {
    throw Error(ErrorCode::Domain, "f_at: radius outside trajectory range");
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), r,
                             [](double v, const Sample& s) { return v < s.r; });
  std::size_t i = it == samples.begin() ? 0 : static_cast<std::size_t>(it - samples.begin()) - 1;
  i = std::min(i, samples.size() - 2);
  const auto& s0 = samples[i];
  const auto& s1 = samples[i + 1];
  return num::hermite(r, s0.r, s1.r, s0.f, s1.f, s0.fprime, s1.fprime);
}

double Trajectory::g_at(double r) const {
  if (samples.empty() || r < samples.front().r || r > samples.back().r) {
    throw Error(ErrorCode::Domain, "g_at: radius outside trajectory range");
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), r,
                             [](double v, const Sample& s) { return v < s.r; });
  std::size_t i = it == samples.begin() ? 0 : static_cast<std::size_t>(it - samples.begin()) - 1;
  i = std::min(i, samples.size() - 2);
  const auto& s0 = samples[i];
  const auto& s1 = samples[i + 1];
  return num::hermite(r, s0.r, s1.r, s0.g, s1.g, s0.dg, s1.dg);
}

ProfileState Trajectory::state_at(double r) const { return {r, f_at(r), g_at(r)}; }

std::size_t annotate_w_h(Trajectory& traj) {
  std::size_t flagged = 0;
  for (auto& s : traj.samples) {
    if (s.g > 0.0) {
      s.w = std::exp(log_rho(traj.params, s.r) + std::log(s.g));
      s.h = s.f / s.g;
    } else {
      s.w = weight_rho(traj.params, s.r) * s.g;
      s.h = std::numeric_limits<double>::quiet_NaN();
      ++flagged;
    }
  }
  return flagged;
}

Trajectory integrate(const Params& params, double a, const IntegratorOptions& opts,
                     const StepObserver& observer, OdeSystem system) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::InvalidArgument, "shooting parameter a must be positive and finite");
  }
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) || !(opts.r_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "integrator tolerances and r_max must be positive");
  }
  Trajectory traj;
  traj.params = params;
  traj.a = a;
  traj.system = system;

  const double eps = opts.eps_start > 0.0 ? opts.eps_start : default_eps_start(a);
  const auto s0 = series_start(params, a, eps, system);
  double r = s0.r;
  Vec y{s0.f, s0.g};
  traj.samples.push_back(make_sample(params, r, y[0], y[1], system));
  if (observer && !observer(traj, traj.samples.back())) return traj;

  Vec k1 = eval(params, r, y, system);
  double h = 0.1 * eps;
  bool f_crossed = false;
  long steps = 0;

  auto hmax_at = [&](double rr) { return rr < opts.near_radius ? opts.h_max_near : opts.h_max_far; };

  while (r < opts.r_max) {
    if (++steps > opts.max_steps) {
      throw Error(ErrorCode::StepSizeUnderflow, "integrate: step budget exhausted");
    }
    h = std::min({h, hmax_at(r), opts.r_max - r});
    if (h < 1e-14 * std::max(1.0, r)) {
      std::ostringstream os;
      os.precision(17);
      os << "StepSizeUnderflow at r = " << r << " (f = " << y[0] << ", g = " << y[1]
         << ", a = " << a << ")";
      throw Error(ErrorCode::StepSizeUnderflow, os.str());
    }

    Vec yt, k2, k3, k4, k5, k6, k7, ynew;
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
    k2 = eval(params, r + c2 * h, yt, system);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = eval(params, r + c3 * h, yt, system);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = eval(params, r + c4 * h, yt, system);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = eval(params, r + c5 * h, yt, system);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = eval(params, r + h, yt, system);
    for (int i = 0; i < 2; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = eval(params, r + h, ynew, system);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(0.5 * err);
    if (!std::isfinite(err)) err = 1e10;

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    Dense dense;
    dense.r0 = r;
    dense.h = h;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      dense.rc[0][i] = y[i];
      dense.rc[1][i] = ydiff;
      dense.rc[2][i] = bspl;
      dense.rc[3][i] = ydiff - h * k7[i] - bspl;
      dense.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
    }
    const double r_new = r + h;

    // Sign changes within the step. The smaller root wins a tie.
    std::optional<double> rf, rg;
    if (!f_crossed && y[0] > 0.0 && ynew[0] <= 0.0) {
      rf = ynew[0] == 0.0 ? r_new : locate_root(dense, 0, r, r_new);
    }
    if (y[1] > 0.0 && ynew[1] <= 0.0) {
      rg = ynew[1] == 0.0 ? r_new : locate_root(dense, 1, r, r_new);
    }
    if (rf && rg && *rg < *rf) rf.reset();

    if (rf) {
      f_crossed = true;
      const Vec ye = dense.at(*rf);
      const auto d = rhs(params, {*rf, 0.0, ye[1]}, system);
      traj.events.push_back({EventKind::FZero, *rf, 0.0, ye[1], d.df});
      if (!opts.continue_past_fzero) {
        if (*rf > r) traj.samples.push_back(make_sample(params, *rf, 0.0, ye[1], system));
        return traj;
      }
      if (!rg) {
        // keep the root itself as a sample, then finish the step
        if (*rf > r && *rf < r_new) {
          traj.samples.push_back(make_sample(params, *rf, 0.0, ye[1], system));
        }
      }
    }
    if (rg) {
      const Vec ye = dense.at(*rg);
      const auto d = rhs(params, {*rg, ye[0], 0.0}, system);
      traj.events.push_back({EventKind::GZero, *rg, ye[0], 0.0, d.df});
      if (*rg > traj.samples.back().r) {
        traj.samples.push_back(make_sample(params, *rg, ye[0], 0.0, system));
      }
      return traj;
    }

    r = r_new;
    y = ynew;
    k1 = k7;
    traj.samples.push_back(make_sample(params, r, y[0], y[1], system));
    if (observer && !observer(traj, traj.samples.back())) return traj;

    const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }

  traj.events.push_back({EventKind::Truncated, r, y[0], y[1], traj.samples.back().fprime});
  return traj;
}

Trajectory psi_integrate(const Params& params, const IntegratorOptions& opts) {
  IntegratorOptions o = opts;
  o.continue_past_fzero = false;
  auto traj = integrate(params, 1.0, o, {}, OdeSystem::AbsorptionFree);
  if (!traj.has_event(EventKind::FZero)) {
    std::ostringstream os;
    os << "NoZeroWithinHorizon: psi stayed positive up to s = " << traj.r_end();
    throw Error(ErrorCode::NoZeroWithinHorizon, os.str());
  }
  return traj;
}

}  // namespace selfsim
